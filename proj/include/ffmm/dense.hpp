// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ffmm/field.hpp"

namespace ffmm {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

template <typename T>
class Mat;

// Non-owning strided window into a row-major matrix.  Writes through a view
// are visible in the parent; disjoint views may be written concurrently.
template <typename T>
class MatView {
public:
    MatView() : data_(nullptr), rows_(0), cols_(0), stride_(0) {}
    MatView(T* data, std::size_t rows, std::size_t cols, std::size_t stride)
        : data_(data), rows_(rows), cols_(cols), stride_(stride) {
        if (stride < cols) throw DimensionError("stride < cols");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }
    T* data() const { return data_; }

    T& operator()(std::size_t i, std::size_t j) const {
        return data_[i * stride_ + j];
    }
    T* row(std::size_t i) const { return data_ + i * stride_; }

    MatView block(std::size_t r0, std::size_t c0, std::size_t nr,
                  std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_)
            throw DimensionError("block window out of bounds");
        return MatView(data_ + r0 * stride_ + c0, nr, nc, stride_);
    }

private:
    T* data_;
    std::size_t rows_, cols_, stride_;
};

template <typename T>
class ConstMatView {
public:
    ConstMatView() : data_(nullptr), rows_(0), cols_(0), stride_(0) {}
    ConstMatView(const T* data, std::size_t rows, std::size_t cols,
                 std::size_t stride)
        : data_(data), rows_(rows), cols_(cols), stride_(stride) {
        if (stride < cols) throw DimensionError("stride < cols");
    }
    ConstMatView(const MatView<T>& v)
        : data_(v.data()), rows_(v.rows()), cols_(v.cols()),
          stride_(v.stride()) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }
    const T* data() const { return data_; }

    const T& operator()(std::size_t i, std::size_t j) const {
        return data_[i * stride_ + j];
    }
    const T* row(std::size_t i) const { return data_ + i * stride_; }

    ConstMatView block(std::size_t r0, std::size_t c0, std::size_t nr,
                       std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_)
            throw DimensionError("block window out of bounds");
        return ConstMatView(data_ + r0 * stride_ + c0, nr, nc, stride_);
    }

private:
    const T* data_;
    std::size_t rows_, cols_, stride_;
};

// Owning row-major dense matrix.  Element type is a parameter so field
// residues (int64_t) and arbitrary-precision integers share the container.
template <typename T>
class Mat {
public:
    Mat() : rows_(0), cols_(0) {}
    Mat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }

    MatView<T> view() {
        return MatView<T>(data_.data(), rows_, cols_, cols_);
    }
    ConstMatView<T> view() const {
        return ConstMatView<T>(data_.data(), rows_, cols_, cols_);
    }
    MatView<T> block(std::size_t r0, std::size_t c0, std::size_t nr,
                     std::size_t nc) {
        return view().block(r0, c0, nr, nc);
    }
    ConstMatView<T> block(std::size_t r0, std::size_t c0, std::size_t nr,
                          std::size_t nc) const {
        return view().block(r0, c0, nr, nc);
    }

    operator MatView<T>() { return view(); }
    operator ConstMatView<T>() const { return view(); }

    bool operator==(const Mat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    static Mat identity(std::size_t n, T one = T(1)) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
        return m;
    }

private:
    std::size_t rows_, cols_;
    std::vector<T> data_;
};

using ElemMat = Mat<std::int64_t>;
using ElemView = MatView<std::int64_t>;
using ConstElemView = ConstMatView<std::int64_t>;

enum class AddSub { Add, Sub };

// C = A +/- B elementwise over F; any of the views may alias.
inline void mat_addsub(MatView<std::int64_t> C, ConstMatView<std::int64_t> A,
                       ConstMatView<std::int64_t> B, AddSub op,
                       const PrimeField& F, OpCounter* ops = nullptr) {
    if (A.rows() != B.rows() || A.cols() != B.cols() ||
        C.rows() != A.rows() || C.cols() != A.cols())
        throw DimensionError("mat_addsub: dimension mismatch");
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const std::int64_t* a = A.row(i);
        const std::int64_t* b = B.row(i);
        std::int64_t* c = C.row(i);
        if (op == AddSub::Add)
            for (std::size_t j = 0; j < A.cols(); ++j) c[j] = F.add(a[j], b[j]);
        else
            for (std::size_t j = 0; j < A.cols(); ++j) c[j] = F.sub(a[j], b[j]);
    }
    if (ops) ops->adds += static_cast<std::uint64_t>(A.rows()) * A.cols();
}

inline Mat<std::int64_t> mat_addsub(ConstMatView<std::int64_t> A,
                                    ConstMatView<std::int64_t> B, AddSub op,
                                    const PrimeField& F,
                                    OpCounter* ops = nullptr) {
    Mat<std::int64_t> C(A.rows(), A.cols());
    mat_addsub(C.view(), A, B, op, F, ops);
    return C;
}

template <typename T>
void mat_copy(MatView<T> dst, ConstMatView<T> src) {
    if (dst.rows() != src.rows() || dst.cols() != src.cols())
        throw DimensionError("mat_copy: dimension mismatch");
    for (std::size_t i = 0; i < src.rows(); ++i)
        for (std::size_t j = 0; j < src.cols(); ++j) dst(i, j) = src(i, j);
}

inline void mat_negate(MatView<std::int64_t> M, const PrimeField& F,
                       OpCounter* ops = nullptr) {
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j) M(i, j) = F.neg(M(i, j));
    if (ops) ops->adds += static_cast<std::uint64_t>(M.rows()) * M.cols();
}

template <typename T>
void mat_zero(MatView<T> M) {
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j) M(i, j) = T(0);
}

template <typename T>
bool mat_equal(ConstMatView<T> A, ConstMatView<T> B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) return false;
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            if (!(A(i, j) == B(i, j))) return false;
    return true;
}

}  // namespace ffmm
