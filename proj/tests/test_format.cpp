#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "cbvh/format.hpp"
#include "golden_trees.hpp"

using namespace cbvh;

namespace {

std::vector<std::uint8_t> read_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string golden_path(const std::string& name) { return std::string(CBVH_GOLDEN_DIR) + "/" + name; }

} // namespace

TEST(Golden, ByteExact)
{
    const bool update = std::getenv("CBVH_UPDATE_GOLDEN") != nullptr;
    for (const auto& ref : golden::references()) {
        const auto bytes = serialize(ref.bvh);
        if (update)
            write_cbvh_file(golden_path(ref.file), ref.bvh);
        const auto frozen = read_bytes(golden_path(ref.file));
        ASSERT_FALSE(frozen.empty()) << ref.file;
        EXPECT_EQ(bytes, frozen) << ref.file;
        const auto back = deserialize(frozen);
        EXPECT_TRUE(back == ref.bvh) << ref.file;
        EXPECT_EQ(serialize(back), frozen);
    }
}

TEST(Golden, HeaderFields)
{
    const auto refs = golden::references();
    const auto bytes = read_bytes(golden_path(refs[2].file));
    ASSERT_GE(bytes.size(), kCbvhHeaderBytes);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CBVH");
    EXPECT_EQ(bytes[4] | bytes[5] << 8, 1);
    EXPECT_EQ(bytes[6], 2); // delta
    EXPECT_EQ(bytes[7], 6);
    EXPECT_EQ(bytes[8], 4);
    EXPECT_EQ(bytes[9], 6);
    EXPECT_EQ(bytes[12] | bytes[13] << 8, 256);
}

TEST(Format, FileRoundTrip)
{
    const auto refs = golden::references();
    const auto path = (std::filesystem::temp_directory_path() / "cbvh_roundtrip.cbvh").string();
    write_cbvh_file(path, refs[1].bvh);
    EXPECT_TRUE(read_cbvh_file(path) == refs[1].bvh);
    std::filesystem::remove(path);
    EXPECT_THROW(read_cbvh_file(path), std::runtime_error);
}

TEST(Format, Deterministic)
{
    const auto a = golden::references();
    const auto b = golden::references();
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_EQ(serialize(a[i].bvh), serialize(b[i].bvh));
}

TEST(Format, RejectsMalformed)
{
    const auto good = serialize(golden::references()[2].bvh);
    auto bad = good;
    bad[0] = 'X';
    EXPECT_THROW(deserialize(bad), FormatError);
    bad = good;
    bad[4] = 9;
    EXPECT_THROW(deserialize(bad), FormatError);
    bad = good;
    bad[6] = 3;
    EXPECT_THROW(deserialize(bad), FormatError);
    bad = good;
    bad[7] = 8;
    EXPECT_THROW(deserialize(bad), FormatError);
    bad = good;
    bad.pop_back();
    EXPECT_THROW(deserialize(bad), FormatError);
    bad = good;
    bad.push_back(0);
    EXPECT_THROW(deserialize(bad), FormatError);
    EXPECT_THROW(deserialize(std::span<const std::uint8_t>(good.data(), 10)), FormatError);
}
