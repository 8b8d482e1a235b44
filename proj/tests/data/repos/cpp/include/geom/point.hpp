#pragma once

// 2-D point.
struct Point {
    double x = 0;
    double y = 0;
};
