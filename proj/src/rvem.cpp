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

#include "revive/rvem.hpp"

#include <bit>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "revive/error.hpp"

namespace revive::rvem {

namespace {

template <typename T>
void put_le(std::ostream& os, T value) {
    char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
    }
    os.write(bytes, sizeof(T));
}

template <typename T>
T get_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return static_cast<T>(v);
}

bool has_implicit_ids(const vecindex::EmbeddingMatrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (m.id(r) != std::to_string(r)) return false;
    }
    return true;
}

} // namespace

std::filesystem::path ids_sidecar_path(const std::filesystem::path& path) {
    return std::filesystem::path(path.string() + ".ids.jsonl");
}

void write(const std::filesystem::path& path, const vecindex::EmbeddingMatrix& matrix) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
    os.write("RVEM", 4);
    put_le<std::uint16_t>(os, kVersion);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(matrix.dim()));
    put_le<std::uint64_t>(os, static_cast<std::uint64_t>(matrix.rows()));
    std::vector<char> buf;
    buf.reserve(matrix.data().size() * 4);
    for (float f : matrix.data()) {
        const auto bits = std::bit_cast<std::uint32_t>(f);
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");

    const auto sidecar = ids_sidecar_path(path);
    if (has_implicit_ids(matrix)) {
        std::filesystem::remove(sidecar);
        return;
    }
    std::ofstream ids(sidecar, std::ios::trunc);
    if (!ids) throw Error(ErrorKind::kIo, "cannot open '" + sidecar.string() + "' for writing");
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        nlohmann::json line = {{"row", r}, {"id", matrix.id(r)}};
        ids << line.dump() << '\n';
    }
}

vecindex::EmbeddingMatrix read(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::kMissingInput, "embedding file '" + path.string() + "' not found");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    constexpr std::size_t kHeader = 4 + 2 + 4 + 8;
    if (bytes.size() < kHeader || std::string(bytes.begin(), bytes.begin() + 4) != "RVEM") {
        throw Error(ErrorKind::kParse, "'" + path.string() + "' is not an RVEM file");
    }
    const auto version = get_le<std::uint16_t>(bytes.data() + 4);
    if (version != kVersion) {
        throw Error(ErrorKind::kParse, "'" + path.string() + "': unsupported RVEM version " + std::to_string(version));
    }
    const auto dim = get_le<std::uint32_t>(bytes.data() + 6);
    const auto count = get_le<std::uint64_t>(bytes.data() + 10);
    if (dim == 0) throw Error(ErrorKind::kParse, "'" + path.string() + "': zero dim");
    const std::uint64_t payload = count * dim * 4;
    if (bytes.size() - kHeader != payload) {
        throw Error(ErrorKind::kParse, "'" + path.string() + "': payload is " + std::to_string(bytes.size() - kHeader) +
                                               " bytes, header implies " + std::to_string(payload));
    }
    std::vector<float> data(count * dim);
    const unsigned char* p = bytes.data() + kHeader;
    for (std::size_t i = 0; i < data.size(); ++i, p += 4) {
        data[i] = std::bit_cast<float>(get_le<std::uint32_t>(p));
    }

    std::vector<std::string> ids;
    const auto sidecar = ids_sidecar_path(path);
    if (std::filesystem::exists(sidecar)) {
        ids.assign(count, std::string());
        std::vector<bool> seen(count, false);
        std::ifstream in(sidecar);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            try {
                auto j = nlohmann::json::parse(line);
                const auto row = j.at("row").get<std::uint64_t>();
                if (row >= count || seen[row]) {
                    throw Error(ErrorKind::kParse, "bad or repeated row " + std::to_string(row));
                }
                seen[row] = true;
                ids[row] = j.at("id").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorKind::kParse,
                            sidecar.string() + ":" + std::to_string(line_no) + ": " + e.what());
            } catch (const Error& e) {
                throw Error(ErrorKind::kParse,
                            sidecar.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
        for (std::uint64_t r = 0; r < count; ++r) {
            if (!seen[r]) throw Error(ErrorKind::kParse, sidecar.string() + ": missing id for row " + std::to_string(r));
        }
    }
    return vecindex::EmbeddingMatrix(dim, std::move(data), std::move(ids));
}

} // namespace revive::rvem
