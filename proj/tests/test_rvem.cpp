// Copyright 2026 The Revive Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <random>

#include "revive/error.hpp"
#include "revive/rvem.hpp"
#include "toy_task.hpp"

namespace revive::rvem {
namespace {

TEST(Rvem, RoundTripIsBitIdentical) {
    const auto dir = testing::scratch_dir("rvem_roundtrip");
    std::mt19937_64 rng(1);
    std::vector<float> data(37 * 13);
    for (auto& v : data) v = std::bit_cast<float>(static_cast<std::uint32_t>(rng() & 0x7f7fffffu));
    data[0] = -0.0f;
    data[1] = std::numeric_limits<float>::denorm_min();
    data[2] = std::numeric_limits<float>::max();
    vecindex::EmbeddingMatrix m(13, data);
    write(dir / "a.rvem", m);
    const auto back = read(dir / "a.rvem");
    ASSERT_EQ(back.dim(), 13u);
    ASSERT_EQ(back.rows(), 37u);
    EXPECT_EQ(std::memcmp(back.data().data(), data.data(), data.size() * sizeof(float)), 0);
    EXPECT_FALSE(std::filesystem::exists(ids_sidecar_path(dir / "a.rvem")));
}

TEST(Rvem, HeaderLayout) {
    const auto dir = testing::scratch_dir("rvem_header");
    write(dir / "h.rvem", vecindex::EmbeddingMatrix(2, {1.0f, -2.0f}));
    std::ifstream in(dir / "h.rvem", std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
    const std::vector<unsigned char> want = {'R', 'V', 'E', 'M', 1, 0, 2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0,
                                             0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0xc0};
    EXPECT_EQ(bytes, want);
}

TEST(Rvem, ExplicitIdsUseSidecar) {
    const auto dir = testing::scratch_dir("rvem_ids");
    write(dir / "t.rvem", vecindex::EmbeddingMatrix(1, {1, 2}, {"dog", "cat"}));
    EXPECT_TRUE(std::filesystem::exists(ids_sidecar_path(dir / "t.rvem")));
    const auto back = read(dir / "t.rvem");
    EXPECT_EQ(back.id(0), "dog");
    EXPECT_EQ(back.id(1), "cat");
}

TEST(Rvem, ZeroRows) {
    const auto dir = testing::scratch_dir("rvem_empty");
    write(dir / "e.rvem", vecindex::EmbeddingMatrix(8, {}));
    const auto back = read(dir / "e.rvem");
    EXPECT_EQ(back.rows(), 0u);
    EXPECT_EQ(back.dim(), 8u);
}

TEST(Rvem, Errors) {
    const auto dir = testing::scratch_dir("rvem_errors");
    try {
        read(dir / "missing.rvem");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kMissingInput);
    }
    {
        std::ofstream(dir / "bad.rvem", std::ios::binary) << "XXXX";
    }
    EXPECT_THROW(read(dir / "bad.rvem"), Error);
    write(dir / "short.rvem", vecindex::EmbeddingMatrix(4, {1, 2, 3, 4}));
    std::filesystem::resize_file(dir / "short.rvem", std::filesystem::file_size(dir / "short.rvem") - 1);
    try {
        read(dir / "short.rvem");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kParse);
    }
}

} // namespace
} // namespace revive::rvem
