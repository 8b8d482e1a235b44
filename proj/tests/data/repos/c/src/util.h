#ifndef UTIL_H
#define UTIL_H
#include "../include/vec.h"

/* Sum of all elements. */
static inline long vec_sum(const vec *v) {
    long s = 0;
    for (size_t i = 0; i < v->len; ++i) s += v->data[i];
    return s;
}
#endif
