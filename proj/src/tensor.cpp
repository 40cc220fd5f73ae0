#include "dsc/tensor.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "dsc/workload.hpp"

namespace dsc {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'D', 'E', 'A'};
constexpr std::uint16_t kVersion = 1;

std::size_t product(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t element_bytes(DType t) { return t == DType::Acc32 ? 4 : 1; }

template <typename T>
void put_le(std::ostream& out, T v) {
    using U = std::make_unsigned_t<T>;
    const U u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.put(static_cast<char>((u >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(std::istream& in, const std::string& what) {
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        const int c = in.get();
        if (c == std::char_traits<char>::eof()) throw FormatError(what + ": truncated header");
        u |= static_cast<U>(static_cast<U>(c & 0xff) << (8 * i));
    }
    return static_cast<T>(u);
}

}  // namespace

const char* dtype_name(DType t) {
    switch (t) {
        case DType::Act8: return "act8";
        case DType::Wgt8: return "wgt8";
        case DType::Acc32: return "acc32";
    }
    return "?";
}

std::int64_t dtype_min(DType t) {
    switch (t) {
        case DType::Act8: return 0;
        case DType::Wgt8: return -128;
        case DType::Acc32: return std::numeric_limits<std::int32_t>::min();
    }
    return 0;
}

std::int64_t dtype_max(DType t) {
    switch (t) {
        case DType::Act8: return 255;
        case DType::Wgt8: return 127;
        case DType::Acc32: return std::numeric_limits<std::int32_t>::max();
    }
    return 0;
}

QuantTensor::QuantTensor(DType dtype, std::vector<std::size_t> dims)
    : dtype_(dtype), dims_(std::move(dims)), data_(product(dims_), 0) {}

QuantTensor::QuantTensor(DType dtype, std::vector<std::size_t> dims, std::vector<std::int32_t> data)
    : dtype_(dtype), dims_(std::move(dims)), data_(std::move(data)) {
    if (data_.size() != product(dims_))
        throw ShapeError("tensor payload length " + std::to_string(data_.size()) +
                         " does not match dims product " + std::to_string(product(dims_)));
}

bool QuantTensor::in_range() const {
    const std::int64_t lo = dtype_min(dtype_), hi = dtype_max(dtype_);
    return std::all_of(data_.begin(), data_.end(), [&](std::int32_t v) { return v >= lo && v <= hi; });
}

std::string TensorMismatch::describe() const {
    std::ostringstream ss;
    if (index.empty()) {
        ss << "shape/dtype mismatch";
        return ss.str();
    }
    ss << "(";
    for (std::size_t i = 0; i < index.size(); ++i) ss << (i ? "," : "") << index[i];
    ss << "): " << lhs << " != " << rhs;
    return ss.str();
}

std::optional<TensorMismatch> first_mismatch(const QuantTensor& a, const QuantTensor& b) {
    if (a.dtype() != b.dtype() || a.dims() != b.dims()) return TensorMismatch{};
    const auto [ia, ib] = std::mismatch(a.data().begin(), a.data().end(), b.data().begin());
    if (ia == a.data().end()) return std::nullopt;

    std::size_t flat = static_cast<std::size_t>(ia - a.data().begin());
    TensorMismatch m;
    m.lhs = *ia;
    m.rhs = *ib;
    m.index.assign(a.ndim(), 0);
    for (std::size_t d = a.ndim(); d-- > 0;) {
        m.index[d] = flat % a.dim(d);
        flat /= a.dim(d);
    }
    return m;
}

double zero_fraction(const QuantTensor& t) {
    if (t.size() == 0) return 0.0;
    const auto zeros = std::count(t.data().begin(), t.data().end(), 0);
    return static_cast<double>(zeros) / static_cast<double>(t.size());
}

void write_tensor(std::ostream& out, const QuantTensor& t) {
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint16_t>(out, kVersion);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.dtype()));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.ndim()));
    for (std::size_t d : t.dims()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (std::int32_t v : t.data()) {
        switch (t.dtype()) {
            case DType::Act8: put_le<std::uint8_t>(out, static_cast<std::uint8_t>(v)); break;
            case DType::Wgt8: put_le<std::int8_t>(out, static_cast<std::int8_t>(v)); break;
            case DType::Acc32: put_le<std::int32_t>(out, v); break;
        }
    }
}

void write_tensor(const std::filesystem::path& path, const QuantTensor& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_tensor(out, t);
}

QuantTensor read_tensor(std::istream& in, const std::string& what) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || magic != kMagic) throw FormatError(what + ": bad magic");
    if (get_le<std::uint16_t>(in, what) != kVersion) throw FormatError(what + ": unsupported version");
    const auto raw_dtype = get_le<std::uint8_t>(in, what);
    if (raw_dtype > 2) throw FormatError(what + ": unknown dtype " + std::to_string(raw_dtype));
    const auto dtype = static_cast<DType>(raw_dtype);
    const auto ndim = get_le<std::uint8_t>(in, what);

    std::vector<std::size_t> dims(ndim);
    for (auto& d : dims) d = get_le<std::uint32_t>(in, what);
    const std::size_t count = product(dims);

    std::vector<unsigned char> bytes(count * element_bytes(dtype));
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size()) throw FormatError(what + ": truncated payload");
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError(what + ": trailing bytes");

    std::vector<std::int32_t> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        switch (dtype) {
            case DType::Act8: data[i] = bytes[i]; break;
            case DType::Wgt8: data[i] = static_cast<std::int8_t>(bytes[i]); break;
            case DType::Acc32: {
                const unsigned char* p = &bytes[4 * i];
                data[i] = static_cast<std::int32_t>(std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                                                    (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24));
                break;
            }
        }
    }
    return QuantTensor(dtype, std::move(dims), std::move(data));
}

QuantTensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open tensor file " + path.string());
    return read_tensor(in, path.string());
}

}  // namespace dsc
