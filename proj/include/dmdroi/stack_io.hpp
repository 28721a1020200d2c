#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "dmdroi/image.hpp"

namespace dmdroi {

/// Data matrix with one flattened frame per column (mn rows, N columns).
Eigen::MatrixXd build_data_matrix(const ImageStack& stack);

/// Inverse of build_data_matrix for a single column.
Frame column_to_frame(const Eigen::Ref<const Eigen::VectorXd>& column, int height, int width);

/// Loads either a DMDSTACK file or a directory of P5 PGM frames.
///
/// Directory frames are ordered by lexicographic filename and promoted to
/// doubles without rescaling. Throws NotFound, DimensionMismatch,
/// TooFewFrames or FormatError.
ImageStack load_stack(const std::filesystem::path& path);

/// Writes DMDSTACK v1: `DMDSTACK 1 <m> <n> <N> <dt>\n` then m*n*N
/// little-endian float64 values. Throws WriteError.
void save_stack(const ImageStack& stack, const std::filesystem::path& path);

/// Reads one P5 PGM (maxval 255 or 65535) into a frame without rescaling.
Frame read_pgm(const std::filesystem::path& path);

/// Writes a 16-bit P5 PGM. With normalize, min maps to 0 and max to 65535
/// (half-up rounding, constant frames become all zeros); otherwise values
/// are rounded and clamped to [0, 65535].
void export_frame_image(const Frame& frame, const std::filesystem::path& path, bool normalize);

/// 16-bit sample values export_frame_image would write.
std::vector<std::uint16_t> quantize_frame(const Frame& frame, bool normalize);

/// 8-bit P5 PGM with 0 for unset and 255 for set pixels.
void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path);

/// Any nonzero sample becomes a set pixel.
BinaryMask read_mask_pgm(const std::filesystem::path& path);

}  // namespace dmdroi
