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

#include "revive/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <map>
#include <vector>

#include "revive/error.hpp"

namespace revive::fusion {

namespace {

class Writer {
public:
    template <typename T>
    void put(T value) {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buf_.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
        }
    }
    void bytes(const std::string& s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
    const std::vector<char>& buffer() const { return buf_; }

private:
    std::vector<char> buf_;
};

class Reader {
public:
    Reader(std::vector<unsigned char> data, std::string source) : data_(std::move(data)), source_(std::move(source)) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        return static_cast<T>(v);
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                      data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > data_.size()) throw Error(ErrorKind::kParse, "checkpoint '" + source_ + "' is truncated");
    }

    std::vector<unsigned char> data_;
    std::string source_;
    std::size_t pos_ = 0;
};

} // namespace

void save_checkpoint(const std::filesystem::path& path, const FusionModel& model) {
    Writer w;
    w.bytes("RVCK");
    w.put<std::uint16_t>(kCheckpointVersion);
    const std::string cfg = model.config().to_json().dump();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.size()));
    w.bytes(cfg);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(model.parameters().size()));
    for (const auto& p : model.parameters()) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(p.name.size()));
        w.bytes(p.name);
        w.put<std::uint32_t>(2);
        w.put<std::uint64_t>(p.value.rows);
        w.put<std::uint64_t>(p.value.cols);
        for (double v : p.value.data) w.put<std::uint32_t>(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write checkpoint '" + path.string() + "'");
    out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    if (!out) throw Error(ErrorKind::kIo, "write failed for checkpoint '" + path.string() + "'");
}

FusionModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kMissingInput, "checkpoint '" + path.string() + "' not found");
    Reader r(std::vector<unsigned char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()),
             path.string());
    if (r.bytes(4) != "RVCK") throw Error(ErrorKind::kParse, "'" + path.string() + "' is not an RVCK checkpoint");
    const auto version = r.get<std::uint16_t>();
    if (version != kCheckpointVersion) {
        throw Error(ErrorKind::kParse, "checkpoint version " + std::to_string(version) + " unsupported");
    }
    const auto cfg_len = r.get<std::uint32_t>();
    ModelConfig cfg;
    try {
        cfg = ModelConfig::from_json(nlohmann::json::parse(r.bytes(cfg_len)));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::kParse, "checkpoint '" + path.string() + "' config: " + e.what());
    }
    FusionModel model(cfg, 0);

    std::map<std::string, nn::Parameter*> by_name;
    for (auto& p : model.parameters()) by_name[p.name] = &p;
    const auto count = r.get<std::uint32_t>();
    std::size_t loaded = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = r.bytes(r.get<std::uint32_t>());
        const auto ndim = r.get<std::uint32_t>();
        std::vector<std::uint64_t> dims(ndim);
        for (auto& d : dims) d = r.get<std::uint64_t>();
        auto it = by_name.find(name);
        if (it == by_name.end()) throw Error(ErrorKind::kParse, "checkpoint has unknown tensor '" + name + "'");
        nn::Matrix& value = it->second->value;
        if (ndim != 2 || dims[0] != value.rows || dims[1] != value.cols) {
            throw Error(ErrorKind::kParse, "checkpoint tensor '" + name + "' has the wrong shape");
        }
        for (double& v : value.data) v = static_cast<double>(std::bit_cast<float>(r.get<std::uint32_t>()));
        ++loaded;
    }
    if (loaded != by_name.size() || !r.done()) {
        throw Error(ErrorKind::kParse, "checkpoint '" + path.string() + "' does not match its config");
    }
    return model;
}

void round_to_checkpoint_precision(FusionModel& model) {
    for (auto& p : model.parameters()) {
        for (double& v : p.value.data) v = static_cast<double>(static_cast<float>(v));
    }
}

} // namespace revive::fusion
