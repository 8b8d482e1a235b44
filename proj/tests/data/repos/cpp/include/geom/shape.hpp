#pragma once
#include <vector>
#include "point.hpp"

// Closed polygon.
class Shape {
public:
    void add(Point p) { pts_.push_back(p); }
    double perimeter() const;

private:
    std::vector<Point> pts_;
};
