// tensor.hpp: channel-last integer tensors and the binary tensor file format
//
// File layout (little-endian):
//   "EDEA" | u16 version=1 | u8 dtype | u8 ndim | ndim × u32 dims | payload
// payload element width: act8 = 1 byte unsigned, wgt8 = 1 byte signed,
// acc32 = 4 bytes signed.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dsc {

enum class DType : std::uint8_t { Act8 = 0, Wgt8 = 1, Acc32 = 2 };

const char* dtype_name(DType t);
std::int64_t dtype_min(DType t);
std::int64_t dtype_max(DType t);

class QuantTensor {
public:
    QuantTensor() = default;
    QuantTensor(DType dtype, std::vector<std::size_t> dims);
    QuantTensor(DType dtype, std::vector<std::size_t> dims, std::vector<std::int32_t> data);

    DType dtype() const { return dtype_; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t i) const { return dims_.at(i); }
    std::size_t ndim() const { return dims_.size(); }
    std::size_t size() const { return data_.size(); }

    std::vector<std::int32_t>& data() { return data_; }
    const std::vector<std::int32_t>& data() const { return data_; }

    // 3-D (rows, cols, channels) access.
    std::int32_t& at(std::size_t r, std::size_t c, std::size_t ch) {
        return data_[(r * dims_[1] + c) * dims_[2] + ch];
    }
    std::int32_t at(std::size_t r, std::size_t c, std::size_t ch) const {
        return data_[(r * dims_[1] + c) * dims_[2] + ch];
    }
    // 2-D (rows, cols) access.
    std::int32_t& at(std::size_t r, std::size_t c) { return data_[r * dims_[1] + c]; }
    std::int32_t at(std::size_t r, std::size_t c) const { return data_[r * dims_[1] + c]; }

    /// True iff every element lies within the dtype's range.
    bool in_range() const;

    bool operator==(const QuantTensor&) const = default;

private:
    DType dtype_ = DType::Act8;
    std::vector<std::size_t> dims_;
    std::vector<std::int32_t> data_;
};

/// Position of the first differing element, reported as a multi-index.
struct TensorMismatch {
    std::vector<std::size_t> index;
    std::int32_t lhs = 0;
    std::int32_t rhs = 0;
    std::string describe() const;
};

/// nullopt when dtype, dims and payload all agree. A dims mismatch is
/// reported with an empty index.
std::optional<TensorMismatch> first_mismatch(const QuantTensor& a, const QuantTensor& b);

double zero_fraction(const QuantTensor& t);

void write_tensor(std::ostream& out, const QuantTensor& t);
void write_tensor(const std::filesystem::path& path, const QuantTensor& t);
/// Throws FormatError on bad magic, version, dtype, truncation, or
/// out-of-range elements.
QuantTensor read_tensor(std::istream& in, const std::string& what = "tensor");
QuantTensor read_tensor(const std::filesystem::path& path);

}  // namespace dsc
