#pragma once

#include <cstdint>
#include <vector>

#include "ges/image.hpp"
#include "ges/splat.hpp"
#include "ges/train.hpp"

/// Synthetic targets and initializations for experiments and tests.

namespace ges::synth {

/// White axis-aligned square covering the middle half, on black.
Image square_image(int size);

/// Two-tone checkerboard (cell = size / 8) with a saturated disk of radius
/// size / 4 in the middle.
Image checker_disk_image(int size);

/// n random splats spread over a width x height canvas: opacity 0.5,
/// random colors and rotations, isotropic scale ~ canvas / (2 sqrt n).
Scene2 random_scene_2d(int n, int width, int height, std::uint64_t seed);

/// Random splats inside the cube [-1, 1]^3, scales in [0.08, 0.25],
/// opacities in [0.6, 0.95], random colors, b = 0.
Scene3 random_scene_3d(int n, std::uint64_t seed);

/// `count` cameras evenly spaced on a circle of radius `radius` in the
/// y = height plane, all looking at the origin. Images are size x size.
std::vector<Camera> ring_cameras(int count, int size, double radius, double height, double fov_deg = 50.0);

/// Copy of `scene` with positions, scales, colors and opacities jittered.
Scene3 perturb(const Scene3& scene, double amount, std::uint64_t seed);

/// Renders ground-truth views for the given cameras.
std::vector<train::View> render_views(const Scene3& scene, const std::vector<Camera>& cams, int size,
                                      const shape::ShapeModifier& mod);

}  // namespace ges::synth
