#pragma once

#include "augforge/imaging/types.hpp"

namespace augforge::imaging {

/// Bilinear resample with pixel-center alignment and border replication.
Image resize_bilinear(const Image& img, int out_w, int out_h);

/// Nearest-neighbor resample; the convention matches resize_bilinear so a
/// mask stays registered with its image through crop/resize round trips.
Mask resize_nearest(const Mask& mask, int out_w, int out_h);

/// Integer-window crop; the window must lie inside the frame.
Image crop(const Image& img, int x0, int y0, int w, int h);
Mask crop(const Mask& mask, int x0, int y0, int w, int h);

} // namespace augforge::imaging
