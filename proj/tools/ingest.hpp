#pragma once

#include <nltfnn/tensor.hpp>

#include <filesystem>

namespace nltfnn {

/// Stacks the grayscale images of a directory (lexicographic filename order)
/// as frontal slices; 8-bit and 16-bit pixels are scaled to [0, 1]. Throws
/// std::runtime_error naming the offending file on read or size errors.
Tensor3 ingest_slices(const std::filesystem::path &dir);

} // namespace nltfnn
