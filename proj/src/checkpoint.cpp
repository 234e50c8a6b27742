#include "sectorcast/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace sectorcast {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'A', 'S', 'T', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_string(std::string& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out += s;
}

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
                 << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
                 << (8 * i);
        pos_ += 8;
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::string string() {
        const std::uint32_t len = u32();
        need(len);
        std::string s = bytes_.substr(pos_, len);
        pos_ += len;
        return s;
    }

    void raw(char* dest, std::size_t len) {
        need(len);
        std::memcpy(dest, bytes_.data() + pos_, len);
        pos_ += len;
    }

    bool exhausted() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t len) {
        if (pos_ + len > bytes_.size()) throw IoFailure("truncated checkpoint");
    }

    const std::string& bytes_;
    std::size_t pos_ = 0;
};

template <class Matrix>
void put_tensor(std::string& out, const Matrix& m) {
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) put_f64(out, m.data()[i]);
}

template <class Matrix>
void get_tensor(Reader& in, Matrix& m) {
    const std::uint32_t rows = in.u32();
    const std::uint32_t cols = in.u32();
    if (rows != static_cast<std::uint32_t>(m.rows()) ||
        cols != static_cast<std::uint32_t>(m.cols()))
        throw ShapeMismatch("checkpoint tensor " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " disagrees with config shape " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if constexpr (std::endian::native == std::endian::little) {
        in.raw(reinterpret_cast<char*>(m.data()), sizeof(double) * static_cast<std::size_t>(m.size()));
    } else {
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = in.f64();
    }
}

}  // namespace

std::string checkpoint_to_bytes(const Checkpoint& checkpoint) {
    std::string out;
    out.append(kMagic, sizeof(kMagic));
    put_u32(out, kVersion);
    put_u64(out, checkpoint.seed);

    const ModelConfig& c = checkpoint.params.config;
    put_u32(out, static_cast<std::uint32_t>(c.lookback));
    put_u32(out, static_cast<std::uint32_t>(c.feature_count));
    put_u32(out, static_cast<std::uint32_t>(c.lstm_units));
    put_u32(out, static_cast<std::uint32_t>(c.lstm_layers));
    put_u32(out, static_cast<std::uint32_t>(c.dense_units));
    put_u32(out, static_cast<std::uint32_t>(c.batch_size));
    put_u32(out, static_cast<std::uint32_t>(c.epochs));
    put_f64(out, c.dropout_rate);
    put_f64(out, c.huber_delta);
    put_f64(out, c.learning_rate);
    put_f64(out, c.adam_beta1);
    put_f64(out, c.adam_beta2);
    put_f64(out, c.adam_epsilon);
    put_u64(out, c.seed);

    const ScalerParams& s = checkpoint.scaler;
    put_u32(out, static_cast<std::uint32_t>(s.feature_names.size()));
    for (const std::string& name : s.feature_names) put_string(out, name);
    for (Eigen::Index i = 0; i < s.min.size(); ++i) put_f64(out, s.min(i));
    for (Eigen::Index i = 0; i < s.max.size(); ++i) put_f64(out, s.max(i));

    std::uint32_t tensor_count = 0;
    for_each_tensor([&](const auto&) { ++tensor_count; }, checkpoint.params);
    put_u32(out, tensor_count);
    for_each_tensor([&](const auto& t) { put_tensor(out, t); }, checkpoint.params);
    return out;
}

Checkpoint checkpoint_from_bytes(const std::string& bytes) {
    Reader in(bytes);
    char magic[8];
    in.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoFailure("not a model checkpoint (bad magic)");
    const std::uint32_t version = in.u32();
    if (version != kVersion)
        throw IoFailure("unsupported checkpoint version " + std::to_string(version));

    Checkpoint checkpoint;
    checkpoint.seed = in.u64();

    ModelConfig c;
    c.lookback = static_cast<int>(in.u32());
    c.feature_count = static_cast<int>(in.u32());
    c.lstm_units = static_cast<int>(in.u32());
    c.lstm_layers = static_cast<int>(in.u32());
    c.dense_units = static_cast<int>(in.u32());
    c.batch_size = static_cast<int>(in.u32());
    c.epochs = static_cast<int>(in.u32());
    c.dropout_rate = in.f64();
    c.huber_delta = in.f64();
    c.learning_rate = in.f64();
    c.adam_beta1 = in.f64();
    c.adam_beta2 = in.f64();
    c.adam_epsilon = in.f64();
    c.seed = in.u64();
    validate_config(c);

    ScalerParams& s = checkpoint.scaler;
    const std::uint32_t feature_count = in.u32();
    for (std::uint32_t i = 0; i < feature_count; ++i) s.feature_names.push_back(in.string());
    s.min.resize(feature_count);
    s.max.resize(feature_count);
    for (std::uint32_t i = 0; i < feature_count; ++i) s.min(i) = in.f64();
    for (std::uint32_t i = 0; i < feature_count; ++i) s.max(i) = in.f64();

    // Allocate spec'd shapes from the config, then insist the stored
    // shape tags agree.
    ModelConfig shape_only = c;
    shape_only.seed = 0;
    checkpoint.params = init_params(shape_only);
    checkpoint.params.config = c;

    std::uint32_t expected_count = 0;
    for_each_tensor([&](const auto&) { ++expected_count; }, checkpoint.params);
    const std::uint32_t tensor_count = in.u32();
    if (tensor_count != expected_count)
        throw ShapeMismatch("checkpoint holds " + std::to_string(tensor_count) +
                            " tensors, config implies " + std::to_string(expected_count));
    for_each_tensor([&](auto& t) { get_tensor(in, t); }, checkpoint.params);
    if (!in.exhausted()) throw IoFailure("trailing bytes after checkpoint payload");
    return checkpoint;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    const std::string bytes = checkpoint_to_bytes(checkpoint);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoFailure("write failure on " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoFailure("read failure on " + path);
    return checkpoint_from_bytes(bytes);
}

}  // namespace sectorcast
