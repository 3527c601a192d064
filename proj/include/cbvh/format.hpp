#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbvh/compressed.hpp"

namespace cbvh {

/*
 * CBVH file, little endian:
 *
 *   offset  size  field
 *        0     4  magic "CBVH"
 *        4     2  version (1)
 *        6     1  layout tag (0 uncompressed, 1 half, 2 delta)
 *        7     1  k
 *        8     1  branching factor
 *        9     1  residual bits
 *       10     2  reserved, zero
 *       12     4  treelet budget in bytes
 *       16     4  pre-scale (f32, power of two)
 *       20     4  treelet count
 *       24     4  root treelet
 *       28     4  node count
 *       32     4  triangle count
 *       36        treelet blobs, each starting with its own u32 byte size
 *                 then triangle count x u32 leaf triangle order
 */
inline constexpr std::uint16_t kCbvhVersion = 1;
inline constexpr std::size_t kCbvhHeaderBytes = 36;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> serialize(const CompressedBvh& bvh);
/// Throws FormatError on a malformed or truncated buffer.
CompressedBvh deserialize(std::span<const std::uint8_t> bytes);

void write_cbvh_file(const std::string& path, const CompressedBvh& bvh);
CompressedBvh read_cbvh_file(const std::string& path);

} // namespace cbvh
