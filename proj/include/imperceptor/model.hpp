#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "imperceptor/errors.hpp"
#include "imperceptor/image.hpp"
#include "imperceptor/loss.hpp"
#include "imperceptor/network.hpp"

namespace imperceptor {

enum class Arch { modelv, modela };

inline std::string arch_name(Arch a) { return a == Arch::modelv ? "modelv" : "modela"; }

// VGG-style stand-in: two 3x3 conv blocks with pooling.
inline Network make_modelv(int num_identities) {
    Network net;
    net.input_shape = {64, 64, 3};
    net.layers.push_back(Conv2d(64, 64, 3, 8, 3, 3, 1));   // -> 62x62x8
    net.layers.push_back(Relu{});
    net.layers.push_back(MaxPool2d{2});                    // -> 31x31x8
    net.layers.push_back(Conv2d(31, 31, 8, 16, 3, 3, 1));  // -> 29x29x16
    net.layers.push_back(Relu{});
    net.layers.push_back(MaxPool2d{2});                    // -> 14x14x16
    net.layers.push_back(Dense(14 * 14 * 16, 64));
    net.layers.push_back(Relu{});
    net.layers.push_back(Dense(64, num_identities));
    return net;
}

// AlexNet-style stand-in: big strided first kernel, single pool, narrower FC.
inline Network make_modela(int num_identities) {
    Network net;
    net.input_shape = {64, 64, 3};
    net.layers.push_back(Conv2d(64, 64, 3, 6, 5, 5, 2));   // -> 30x30x6
    net.layers.push_back(Relu{});
    net.layers.push_back(Conv2d(30, 30, 6, 12, 3, 3, 1));  // -> 28x28x12
    net.layers.push_back(Relu{});
    net.layers.push_back(MaxPool2d{2});                    // -> 14x14x12
    net.layers.push_back(Dense(14 * 14 * 12, 48));
    net.layers.push_back(Relu{});
    net.layers.push_back(Dense(48, num_identities));
    return net;
}

// A trained classifier. Weights are treated as immutable once training ends;
// classify is pure, so one instance is shareable across threads.
struct TrainedModel {
    std::string name;
    Network net;
    std::vector<int> label_map;  // output index -> identity id (bijection)
    std::uint64_t seed = 0;
    int epochs = 0;
    double final_train_acc = 0.0;
    double final_test_acc = 0.0;
    double normalization = 255.0;  // pixel value that maps to 1.0 at the input

    Tensor forward_pixels(const Tensor& pixels) const {
        Tensor x = pixels;
        for (double& v : x.data) v /= normalization;
        return net.forward(x);
    }

    std::pair<int, Tensor> classify_logits(const Image& img) const {
        Tensor logits = forward_pixels(image_to_tensor(img));
        return {argmax_label(logits), std::move(logits)};
    }

    int classify(const Image& img) const { return classify_logits(img).first; }

    // d(loss)/d(pixel), chained through the [0,1] normalization.
    Tensor input_gradient(const Tensor& pixels, int target_label) const {
        Tensor x = pixels;
        for (double& v : x.data) v /= normalization;
        Tape tape = net.forward_tape(x);
        Tensor g = net.backward(tape, softmaxloss_grad(tape.logits, target_label));
        for (double& v : g.data) v /= normalization;
        return g;
    }
};

namespace detail {

inline std::uint32_t crc32_update(std::uint32_t crc, const void* data, std::size_t len) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    const auto* p = static_cast<const std::uint8_t*>(data);
    crc ^= 0xffffffffu;
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ p[i]) & 0xffu] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

// Little-endian writer that maintains a running CRC of everything written.
class CheckedWriter {
public:
    explicit CheckedWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open for writing: " + path.string());
    }

    void bytes(const void* data, std::size_t len) {
        crc_ = crc32_update(crc_, data, len);
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    }

    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) {
        std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                             static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
        bytes(b, 4);
    }
    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v));
        u32(static_cast<std::uint32_t>(v >> 32));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

    // Trailing checksum, excluded from its own computation.
    void finish() {
        const std::uint32_t crc = crc_;
        std::uint8_t b[4] = {static_cast<std::uint8_t>(crc), static_cast<std::uint8_t>(crc >> 8),
                             static_cast<std::uint8_t>(crc >> 16), static_cast<std::uint8_t>(crc >> 24)};
        out_.write(reinterpret_cast<const char*>(b), 4);
        if (!out_) throw IoError("short write while saving model");
    }

private:
    std::ofstream out_;
    std::uint32_t crc_ = 0;
};

class CheckedReader {
public:
    explicit CheckedReader(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open: " + path.string());
        buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    void bytes(void* dst, std::size_t len) {
        if (pos_ + len > payload_end()) {
            throw WeightFileError(WeightFileError::Kind::truncated, "weight file truncated");
        }
        std::memcpy(dst, buf_.data() + pos_, len);
        pos_ += len;
    }

    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }
    std::uint64_t u64() {
        std::uint64_t lo = u32(), hi = u32();
        return lo | (hi << 32);
    }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string str() {
        std::uint32_t n = u32();
        if (n > payload_end() - pos_) {
            throw WeightFileError(WeightFileError::Kind::truncated, "weight file truncated");
        }
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }

    // Verifies the trailing CRC over everything before it.
    void verify_checksum() {
        if (buf_.size() < 4) {
            throw WeightFileError(WeightFileError::Kind::truncated, "weight file truncated");
        }
        const std::size_t end = payload_end();
        const std::uint32_t stored = static_cast<std::uint8_t>(buf_[end]) |
                                     (static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf_[end + 1])) << 8) |
                                     (static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf_[end + 2])) << 16) |
                                     (static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf_[end + 3])) << 24);
        const std::uint32_t computed = crc32_update(0, buf_.data(), end);
        if (stored != computed) {
            throw WeightFileError(WeightFileError::Kind::bad_checksum,
                                  "weight file checksum mismatch");
        }
    }

    std::size_t payload_end() const { return buf_.size() < 4 ? 0 : buf_.size() - 4; }

private:
    std::vector<char> buf_;
    std::size_t pos_ = 0;
};

}  // namespace detail

constexpr char kWeightMagic[4] = {'M', 'F', 'R', 'W'};
constexpr std::uint8_t kWeightVersion = 1;

// Layer type tags in the weight file.
enum class LayerTag : std::uint8_t { conv = 0, maxpool = 1, relu = 2, dense = 3 };

inline void save_model(const TrainedModel& m, const std::filesystem::path& path) {
    detail::CheckedWriter w(path);
    w.bytes(kWeightMagic, 4);
    w.u8(kWeightVersion);
    w.str(m.name);
    for (int d : m.net.input_shape) w.u32(static_cast<std::uint32_t>(d));
    w.u32(static_cast<std::uint32_t>(m.net.num_outputs()));
    w.u32(static_cast<std::uint32_t>(m.net.layers.size()));
    for (const Layer& layer : m.net.layers) {
        if (const auto* conv = std::get_if<Conv2d>(&layer)) {
            w.u8(static_cast<std::uint8_t>(LayerTag::conv));
            for (int v : {conv->in_h, conv->in_w, conv->in_c, conv->out_c, conv->kh, conv->kw,
                          conv->stride}) {
                w.u32(static_cast<std::uint32_t>(v));
            }
        } else if (const auto* pool = std::get_if<MaxPool2d>(&layer)) {
            w.u8(static_cast<std::uint8_t>(LayerTag::maxpool));
            w.u32(static_cast<std::uint32_t>(pool->size));
        } else if (std::holds_alternative<Relu>(layer)) {
            w.u8(static_cast<std::uint8_t>(LayerTag::relu));
        } else {
            const auto& dense = std::get<Dense>(layer);
            w.u8(static_cast<std::uint8_t>(LayerTag::dense));
            w.u32(static_cast<std::uint32_t>(dense.in_dim));
            w.u32(static_cast<std::uint32_t>(dense.out_dim));
        }
    }
    w.u32(static_cast<std::uint32_t>(m.label_map.size()));
    for (int id : m.label_map) w.u32(static_cast<std::uint32_t>(id));
    w.u64(m.seed);
    w.u32(static_cast<std::uint32_t>(m.epochs));
    w.f64(m.final_train_acc);
    w.f64(m.final_test_acc);
    w.f64(m.normalization);
    for (const Layer& layer : m.net.layers) {
        if (const auto* conv = std::get_if<Conv2d>(&layer)) {
            for (double v : conv->weights.data) w.f64(v);
            for (double v : conv->bias.data) w.f64(v);
        } else if (const auto* dense = std::get_if<Dense>(&layer)) {
            for (double v : dense->weights.data) w.f64(v);
            for (double v : dense->bias.data) w.f64(v);
        }
    }
    w.finish();
}

inline TrainedModel load_model(const std::filesystem::path& path) {
    detail::CheckedReader r(path);

    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kWeightMagic, 4) != 0) {
        throw WeightFileError(WeightFileError::Kind::bad_magic,
                              "not a model weight file: " + path.string());
    }
    const std::uint8_t version = r.u8();
    if (version != kWeightVersion) {
        throw WeightFileError(WeightFileError::Kind::bad_version,
                              "unsupported weight file version " + std::to_string(version));
    }
    r.verify_checksum();

    TrainedModel m;
    m.name = r.str();
    m.net.input_shape = {static_cast<int>(r.u32()), static_cast<int>(r.u32()),
                         static_cast<int>(r.u32())};
    const std::uint32_t num_outputs = r.u32();
    const std::uint32_t num_layers = r.u32();
    for (std::uint32_t i = 0; i < num_layers; ++i) {
        switch (static_cast<LayerTag>(r.u8())) {
            case LayerTag::conv: {
                const int in_h = static_cast<int>(r.u32());
                const int in_w = static_cast<int>(r.u32());
                const int in_c = static_cast<int>(r.u32());
                const int out_c = static_cast<int>(r.u32());
                const int kh = static_cast<int>(r.u32());
                const int kw = static_cast<int>(r.u32());
                const int stride = static_cast<int>(r.u32());
                m.net.layers.push_back(Conv2d(in_h, in_w, in_c, out_c, kh, kw, stride));
                break;
            }
            case LayerTag::maxpool:
                m.net.layers.push_back(MaxPool2d{static_cast<int>(r.u32())});
                break;
            case LayerTag::relu:
                m.net.layers.push_back(Relu{});
                break;
            case LayerTag::dense: {
                const int in_dim = static_cast<int>(r.u32());
                const int out_dim = static_cast<int>(r.u32());
                m.net.layers.push_back(Dense(in_dim, out_dim));
                break;
            }
            default:
                throw WeightFileError(WeightFileError::Kind::bad_version,
                                      "unknown layer tag in weight file");
        }
    }
    const std::uint32_t n_labels = r.u32();
    m.label_map.resize(n_labels);
    for (auto& id : m.label_map) id = static_cast<int>(r.u32());
    m.seed = r.u64();
    m.epochs = static_cast<int>(r.u32());
    m.final_train_acc = r.f64();
    m.final_test_acc = r.f64();
    m.normalization = r.f64();
    for (Layer& layer : m.net.layers) {
        if (auto* conv = std::get_if<Conv2d>(&layer)) {
            for (double& v : conv->weights.data) v = r.f64();
            for (double& v : conv->bias.data) v = r.f64();
        } else if (auto* dense = std::get_if<Dense>(&layer)) {
            for (double& v : dense->weights.data) v = r.f64();
            for (double& v : dense->bias.data) v = r.f64();
        }
    }
    if (m.net.num_outputs() != static_cast<int>(num_outputs)) {
        throw WeightFileError(WeightFileError::Kind::truncated,
                              "weight file output count disagrees with layer stack");
    }
    return m;
}

}  // namespace imperceptor
