#include "sdc/dataio.hpp"

#include <bit>
#include <cstring>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sdc/errors.hpp"
#include "sdc/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");

namespace sdc {

namespace {

constexpr uint32_t kFlagHasLabels = 1u << 0;
constexpr uint32_t kFlagMultiLabel = 1u << 1;

std::vector<char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) {
        throw FormatError("cannot open " + path);
    }
    std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<char> bytes(static_cast<size_t>(size));
    if (size > 0 && !in.read(bytes.data(), size)) {
        throw FormatError("cannot read " + path);
    }
    return bytes;
}

// Sequential little-endian reader over an in-memory file image. Every load
// is bounds-checked so corrupt headers fail before any allocation sized
// from them.
class ByteReader {
public:
    ByteReader(const std::vector<char>& bytes, const std::string& path)
        : bytes_(bytes), path_(path) {}

    template <typename T>
    T load() {
        require(sizeof(T));
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    void require(size_t count) const {
        if (pos_ + count > bytes_.size()) {
            throw FormatError(path_ + ": truncated at byte offset " + std::to_string(pos_) +
                              " (need " + std::to_string(count) + " more bytes, have " +
                              std::to_string(bytes_.size() - pos_) + ")");
        }
    }

    void expect_magic(const char magic[4]) {
        require(4);
        if (std::memcmp(bytes_.data() + pos_, magic, 4) != 0) {
            throw FormatError(path_ + ": bad magic at byte offset 0");
        }
        pos_ += 4;
    }

    void expect_eof() const {
        if (pos_ != bytes_.size()) {
            throw FormatError(path_ + ": trailing garbage at byte offset " +
                              std::to_string(pos_) + " (" +
                              std::to_string(bytes_.size() - pos_) + " extra bytes)");
        }
    }

    size_t pos() const { return pos_; }

private:
    const std::vector<char>& bytes_;
    std::string path_;
    size_t pos_ = 0;
};

}  // namespace

FeatureMatrix read_features(const std::string& path) {
    std::vector<char> bytes = read_file_bytes(path);
    ByteReader r(bytes, path);
    r.expect_magic("SDCF");
    uint32_t version = r.load<uint32_t>();
    if (version != 1) {
        throw FormatError(path + ": unsupported feature file version " + std::to_string(version));
    }
    uint32_t n = r.load<uint32_t>();
    uint32_t d = r.load<uint32_t>();
    uint32_t flags = r.load<uint32_t>();
    if (d == 0) {
        throw FormatError(path + ": zero feature dimension");
    }

    size_t payload = size_t(n) * d * 4;
    size_t label_bytes = 0;
    if (flags & kFlagHasLabels) {
        label_bytes = size_t(n) * ((flags & kFlagMultiLabel) ? 8 : 4);
    }
    r.require(payload + label_bytes);

    FeatureMatrix out;
    out.data = Matrix(n, d);
    for (size_t i = 0; i < size_t(n) * d; ++i) {
        out.data.data[i] = double(r.load<float>());
    }
    if (flags & kFlagHasLabels) {
        out.multi_label = (flags & kFlagMultiLabel) != 0;
        out.labels.resize(n);
        for (uint32_t i = 0; i < n; ++i) {
            out.labels[i] = out.multi_label ? r.load<uint64_t>() : uint64_t(r.load<uint32_t>());
        }
    }
    r.expect_eof();
    return out;
}

void write_features(const std::string& path, const FeatureMatrix& features) {
    if (features.has_labels() && features.labels.size() != features.n()) {
        throw ShapeError("write_features: label count does not match row count");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open " + path + " for writing");
    }
    auto put = [&out](const void* p, size_t len) { out.write(static_cast<const char*>(p), len); };
    uint32_t version = 1;
    uint32_t n = uint32_t(features.n());
    uint32_t d = uint32_t(features.dim());
    uint32_t flags = 0;
    if (features.has_labels()) flags |= kFlagHasLabels;
    if (features.multi_label) flags |= kFlagMultiLabel;
    put("SDCF", 4);
    put(&version, 4);
    put(&n, 4);
    put(&d, 4);
    put(&flags, 4);
    for (double v : features.data.data) {
        float f = float(v);
        put(&f, 4);
    }
    if (features.has_labels()) {
        for (uint64_t label : features.labels) {
            if (features.multi_label) {
                put(&label, 8);
            } else {
                uint32_t l32 = uint32_t(label);
                put(&l32, 4);
            }
        }
    }
    if (!out) {
        throw FormatError("write failed for " + path);
    }
}

FeatureMatrix read_features_csv(const std::string& path, bool label_column) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path);
    }
    FeatureMatrix out;
    std::vector<double> values;
    size_t cols = 0;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            size_t used = 0;
            double v;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw FormatError(path + ": line " + std::to_string(line_no) +
                                  ": non-numeric cell '" + cell + "'");
            }
            while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) {
                ++used;
            }
            if (used != cell.size()) {
                throw FormatError(path + ": line " + std::to_string(line_no) +
                                  ": non-numeric cell '" + cell + "'");
            }
            row.push_back(v);
        }
        if (cols == 0) {
            cols = row.size();
            if (cols < size_t(label_column ? 2 : 1)) {
                throw FormatError(path + ": line 1 has too few columns");
            }
        } else if (row.size() != cols) {
            throw FormatError(path + ": line " + std::to_string(line_no) +
                              " has " + std::to_string(row.size()) + " columns, expected " +
                              std::to_string(cols));
        }
        if (label_column) {
            out.labels.push_back(uint64_t(row.back()));
            row.pop_back();
        }
        values.insert(values.end(), row.begin(), row.end());
    }
    if (values.empty()) {
        throw FormatError(path + ": no data rows");
    }
    size_t d = cols - (label_column ? 1 : 0);
    out.data = Matrix(values.size() / d, d);
    out.data.data = std::move(values);
    return out;
}

PackedCodes read_codes(const std::string& path) {
    std::vector<char> bytes = read_file_bytes(path);
    ByteReader r(bytes, path);
    r.expect_magic("SDCB");
    uint32_t version = r.load<uint32_t>();
    if (version != 1) {
        throw FormatError(path + ": unsupported code file version " + std::to_string(version));
    }
    uint32_t n = r.load<uint32_t>();
    uint32_t k_bits = r.load<uint32_t>();
    if (k_bits == 0) {
        throw FormatError(path + ": zero code length");
    }
    PackedCodes out(n, k_bits);
    r.require(out.words.size() * 8);
    for (uint64_t& w : out.words) {
        w = r.load<uint64_t>();
    }
    r.expect_eof();

    // Enforce the zero-padding invariant so downstream popcounts stay exact.
    uint32_t tail_bits = k_bits % 64;
    if (tail_bits != 0 && out.words_per_row > 0) {
        uint64_t mask = ~((uint64_t(1) << tail_bits) - 1);
        for (size_t i = 0; i < out.n; ++i) {
            if (out.row(i).back() & mask) {
                throw FormatError(path + ": nonzero padding bits in row " + std::to_string(i));
            }
        }
    }
    return out;
}

void write_codes(const std::string& path, const PackedCodes& codes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open " + path + " for writing");
    }
    uint32_t version = 1;
    uint32_t n = uint32_t(codes.n);
    uint32_t k_bits = codes.k_bits;
    out.write("SDCB", 4);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&k_bits), 4);
    out.write(reinterpret_cast<const char*>(codes.words.data()),
              std::streamsize(codes.words.size() * 8));
    if (!out) {
        throw FormatError("write failed for " + path);
    }
}

FeatureMatrix generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n_clusters == 0 || spec.points_per_cluster == 0 || spec.dim == 0) {
        throw DomainError("generate_synthetic: all counts must be >= 1");
    }
    if (spec.within_std < 0.0) {
        throw DomainError("generate_synthetic: within_std must be >= 0");
    }
    Rng rng = derive_rng(spec.seed, RngStream::sampling);

    Matrix centers(spec.n_clusters, spec.dim);
    for (double& c : centers.data) {
        c = spec.center_scale * rng.next_gaussian();
    }

    size_t n = spec.n_clusters * spec.points_per_cluster;
    FeatureMatrix out;
    out.data = Matrix(n, spec.dim);
    out.labels.resize(n);
    size_t row = 0;
    for (size_t c = 0; c < spec.n_clusters; ++c) {
        for (size_t p = 0; p < spec.points_per_cluster; ++p, ++row) {
            double* dst = out.data.data.data() + row * spec.dim;
            const double* ctr = centers.data.data() + c * spec.dim;
            for (size_t j = 0; j < spec.dim; ++j) {
                dst[j] = ctr[j] + spec.within_std * rng.next_gaussian();
            }
            out.labels[row] = c;
        }
    }
    return out;
}

}  // namespace sdc
