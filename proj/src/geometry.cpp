#include "tablink/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

namespace tablink {

Box unite(const Box& a, const Box& b) {
    const double x0 = std::min(a.x, b.x);
    const double y0 = std::min(a.y, b.y);
    const double x1 = std::max(a.right(), b.right());
    const double y1 = std::max(a.bottom(), b.bottom());
    return Box{x0, y0, x1 - x0, y1 - y0};
}

bool box_within_page(const Box& box, const PageInfo& page, double tolerance) {
    const double tx = tolerance * page.width;
    const double ty = tolerance * page.height;
    return box.w >= 0.0 && box.h >= 0.0 && box.x >= -tx && box.y >= -ty &&
           box.right() <= page.width + tx && box.bottom() <= page.height + ty;
}

namespace {

// Shrinks `extent` until origin + extent <= 1 holds in floating point.
double fit_extent(double origin, double extent) {
    extent = std::max(0.0, extent);
    while (origin + extent > 1.0) {
        extent = std::nextafter(extent, 0.0);
    }
    return extent;
}

}  // namespace

NormalizedBox normalize_box(const Box& box, const PageInfo& page, Warnings* warnings) {
    if (!(page.width > 0.0) || !(page.height > 0.0)) {
        throw GeometryError("page " + std::to_string(page.index) + " has a non-positive dimension");
    }

    Box b = box;
    if (!box_within_page(b, page, 0.0)) {
        const double x0 = std::clamp(b.x, 0.0, page.width);
        const double y0 = std::clamp(b.y, 0.0, page.height);
        const double x1 = std::clamp(b.right(), x0, page.width);
        const double y1 = std::clamp(b.bottom(), y0, page.height);
        b = Box{x0, y0, x1 - x0, y1 - y0};
        spdlog::warn("rectangle outside page {} clamped", page.index);
        warn(warnings, "box-clamped", "rectangle outside page " + std::to_string(page.index));
    }

    NormalizedBox out;
    out.page = page.index;
    out.x = std::clamp(b.x / page.width, 0.0, 1.0);
    out.y = std::clamp(b.y / page.height, 0.0, 1.0);
    out.w = fit_extent(out.x, b.w / page.width);
    out.h = fit_extent(out.y, b.h / page.height);
    return out;
}

Box denormalize_box(const NormalizedBox& box, const PageInfo& page) {
    return Box{box.x * page.width, box.y * page.height, box.w * page.width, box.h * page.height};
}

}  // namespace tablink
