#pragma once

#include "tablink/errors.hpp"

namespace tablink {

// Absolute rectangle in page units, origin top-left, y grows downward.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double right() const { return x + w; }
    double bottom() const { return y + h; }

    friend bool operator==(const Box&, const Box&) = default;
};

// Smallest rectangle containing both.
Box unite(const Box& a, const Box& b);

struct PageInfo {
    int index = 0;
    double width = 0.0;
    double height = 0.0;
};

// Rectangle as fractions of the page size. Always satisfies
// 0 <= x, y and x + w <= 1, y + h <= 1.
struct NormalizedBox {
    int page = 0;
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    friend bool operator==(const NormalizedBox&, const NormalizedBox&) = default;
};

bool box_within_page(const Box& box, const PageInfo& page, double tolerance = 1e-6);

/// Converts an absolute rectangle into page fractions.
///
/// Throws GeometryError when the page has a non-positive dimension. A
/// rectangle reaching outside the page is clamped to it and a
/// "box-clamped" warning is appended to `warnings` when one is given.
NormalizedBox normalize_box(const Box& box, const PageInfo& page, Warnings* warnings = nullptr);

Box denormalize_box(const NormalizedBox& box, const PageInfo& page);

}  // namespace tablink
