#pragma once
// Lattices over the truncated Witt ring inside a symplectic ambient space.
//
// A lattice is stored as a global p-power scale together with a canonical
// column echelon basis over the local ring: lower triangular, pivots p^{v_i}
// on the diagonal, entries left of a pivot reduced mod that pivot, and the
// scale normalized so the matrix has at least one unit entry.  Equality of
// lattices is equality of (scale, canonical matrix).
//
// All operations assert the precision guard: pivot valuations must stay
// <= m - 2, so exhausted significance raises precision_error instead of
// silently corrupting results.

#include "stratalab/witt.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stratalab {

constexpr int kPrecGuard = 2;

class Mat {
 public:
  Mat() = default;
  Mat(const RingCtx& R, int rows, int cols)
      : ctx_(&R), rows_(rows), cols_(cols), a_(rows * cols, RingElem::zero(R)) {}

  static Mat identity(const RingCtx& R, int n) {
    Mat m(R, n, n);
    for (int i = 0; i < n; ++i) m(i, i) = RingElem::one(R);
    return m;
  }

  const RingCtx& ctx() const { return *ctx_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  RingElem& operator()(int i, int j) { return a_[i * cols_ + j]; }
  const RingElem& operator()(int i, int j) const { return a_[i * cols_ + j]; }

  friend bool operator==(const Mat& a, const Mat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }
  friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }

  Mat operator*(const Mat& o) const {
    Mat r(*ctx_, rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const RingElem& v = (*this)(i, k);
        if (v.is_zero()) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }

  Mat transpose() const {
    Mat r(*ctx_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Mat frobenius(int k) const {
    Mat r = *this;
    for (auto& e : r.a_) e = e.frobenius(k);
    return r;
  }

  Mat mul_p(int k) const {
    Mat r = *this;
    for (auto& e : r.a_) e = e.mul_p(k);
    return r;
  }

  Mat div_p(int k) const {
    Mat r = *this;
    for (auto& e : r.a_) e = e.div_p(k);
    return r;
  }

  // horizontal concatenation [A | B]
  static Mat hcat(const Mat& a, const Mat& b) {
    Mat r(a.ctx(), a.rows_, a.cols_ + b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
      for (int j = 0; j < a.cols_; ++j) r(i, j) = a(i, j);
      for (int j = 0; j < b.cols_; ++j) r(i, a.cols_ + j) = b(i, j);
    }
    return r;
  }

  Mat block(int r0, int c0, int nr, int nc) const {
    Mat r(*ctx_, nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
    return r;
  }

  int min_valuation() const {
    int v = ctx_->m;
    for (const auto& e : a_) v = std::min(v, e.valuation());
    return v;
  }

  std::string to_string() const {
    std::string s = "[";
    for (int i = 0; i < rows_; ++i) {
      if (i) s += ",";
      s += "[";
      for (int j = 0; j < cols_; ++j) {
        if (j) s += ",";
        s += (*this)(i, j).to_string();
      }
      s += "]";
    }
    return s + "]";
  }

 private:
  const RingCtx* ctx_ = nullptr;
  int rows_ = 0, cols_ = 0;
  std::vector<RingElem> a_;
};

using Vec = std::vector<RingElem>;

struct SmithDecomp {
  std::vector<int> vals;  // nondecreasing pivot valuations
  Mat left_inv;           // U^{-1}
  Mat left;               // U
  Mat right_inv;          // V^{-1}
};

// A = U . diag(p^vals) . V over the local ring, with U, V invertible.
// Requires full row rank within precision (pivot valuations <= m - guard).
inline SmithDecomp smith(const Mat& A, int guard = kPrecGuard) {
  const RingCtx& R = A.ctx();
  int n = A.rows(), k = A.cols();
  int np = std::min(n, k);
  Mat D = A;
  Mat ul = Mat::identity(R, n), u = Mat::identity(R, n), vr = Mat::identity(R, k);
  SmithDecomp out{{}, ul, u, vr};
  for (int t = 0; t < np; ++t) {
    int bi = -1, bj = -1, bv = R.m + 1;
    for (int i = t; i < n; ++i)
      for (int j = t; j < k; ++j) {
        int v = D(i, j).valuation();
        if (v < bv) { bv = v; bi = i; bj = j; }
      }
    if (bv > R.m - guard)
      throw precision_error("smith: pivot valuation " + std::to_string(bv) +
                            " exceeds precision guard");
    // move pivot to (t,t)
    if (bi != t)
      for (int j = 0; j < k; ++j) std::swap(D(t, j), D(bi, j));
    if (bi != t) {
      for (int j = 0; j < n; ++j) std::swap(out.left_inv(t, j), out.left_inv(bi, j));
      for (int i = 0; i < n; ++i) std::swap(out.left(i, t), out.left(i, bi));
    }
    if (bj != t)
      for (int i = 0; i < n; ++i) std::swap(D(i, t), D(i, bj));
    if (bj != t)
      for (int i = 0; i < k; ++i) std::swap(out.right_inv(i, t), out.right_inv(i, bj));
    // normalize pivot to exactly p^v
    RingElem unit = D(t, t).div_p(bv);
    RingElem uinv = unit.inv();
    for (int j = 0; j < k; ++j) D(t, j) = D(t, j) * uinv;
    for (int j = 0; j < n; ++j) out.left_inv(t, j) = out.left_inv(t, j) * uinv;
    for (int i = 0; i < n; ++i) out.left(i, t) = out.left(i, t) * unit;
    // clear column t below pivot
    for (int i = t + 1; i < n; ++i) {
      if (D(i, t).is_zero()) continue;
      RingElem c = D(i, t).div_p(bv);
      for (int j = 0; j < k; ++j) D(i, j) = D(i, j) - c * D(t, j);
      for (int j = 0; j < n; ++j)
        out.left_inv(i, j) = out.left_inv(i, j) - c * out.left_inv(t, j);
      for (int j = 0; j < n; ++j)
        out.left(j, t) = out.left(j, t) + c * out.left(j, i);
    }
    // clear row t right of pivot
    for (int j = t + 1; j < k; ++j) {
      if (D(t, j).is_zero()) continue;
      RingElem c = D(t, j).div_p(bv);
      for (int i = 0; i < k; ++i)
        out.right_inv(i, j) = out.right_inv(i, j) - c * out.right_inv(i, t);
      for (int i = 0; i < n; ++i) D(i, j) = D(i, j) - c * D(i, t);
    }
    out.vals.push_back(bv);
  }
  return out;
}

// Valuations of the Smith diagonal of a square matrix.
inline std::vector<int> smith_valuations(const Mat& A, int guard = kPrecGuard) {
  return smith(A, guard).vals;
}

// Valuations only, without transformation bookkeeping.  Valuations above
// `cap` are reported as cap + 1 instead of raising, so callers can match
// divisor patterns without tripping the precision guard on rejects.
inline std::vector<int> smith_vals_capped(Mat D, int cap) {
  const RingCtx& R = D.ctx();
  int n = std::min(D.rows(), D.cols());
  std::vector<int> vals(n, cap + 1);
  for (int t = 0; t < n; ++t) {
    int bi = -1, bj = -1, bv = R.m + 1;
    for (int i = t; i < D.rows(); ++i)
      for (int j = t; j < D.cols(); ++j) {
        int v = D(i, j).valuation();
        if (v < bv) { bv = v; bi = i; bj = j; }
      }
    if (bv > cap) return vals;  // the remaining divisors all exceed cap
    vals[t] = bv;
    if (bi != t)
      for (int j = t; j < D.cols(); ++j) std::swap(D(t, j), D(bi, j));
    if (bj != t)
      for (int i = t; i < D.rows(); ++i) std::swap(D(i, t), D(i, bj));
    RingElem uinv = D(t, t).div_p(bv).inv();
    for (int j = t; j < D.cols(); ++j) D(t, j) = D(t, j) * uinv;
    for (int i = t + 1; i < D.rows(); ++i) {
      if (D(i, t).is_zero()) continue;
      RingElem c = D(i, t).div_p(bv);
      for (int j = t; j < D.cols(); ++j) D(i, j) = D(i, j) - c * D(t, j);
    }
    for (int j = t + 1; j < D.cols(); ++j) {
      if (D(t, j).is_zero()) continue;
      RingElem c = D(t, j).div_p(bv);
      for (int i = t + 1; i < D.rows(); ++i) D(i, j) = D(i, j) - c * D(i, t);
      D(t, j) = RingElem::zero(R);
    }
  }
  return vals;
}

struct SympSpace {
  const RingCtx* ctx = nullptr;
  int n = 0;
  Mat gram;

  SympSpace() = default;
  SympSpace(const RingCtx& R, Mat g) : ctx(&R), n(g.rows()), gram(std::move(g)) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (gram(i, j) != -gram(j, i))
          throw std::invalid_argument("SympSpace: gram not antisymmetric");
    int dv = 0;
    for (int v : smith_valuations(gram)) dv += v;
    if (dv != 0) throw std::invalid_argument("SympSpace: gram not unimodular");
  }

  // the standard basis convention: (e_i, e_{n+1-j}) = +delta above the center,
  // -delta below
  static SympSpace standard(const RingCtx& R, int n) {
    Mat g(R, n, n);
    for (int i = 0; i < n / 2; ++i) {
      g(i, n - 1 - i) = RingElem::one(R);
      g(n - 1 - i, i) = -RingElem::one(R);
    }
    return SympSpace(R, std::move(g));
  }
};

inline RingElem pairing(const SympSpace& sp, const Vec& x, const Vec& y) {
  RingElem r = RingElem::zero(*sp.ctx);
  for (int i = 0; i < sp.n; ++i) {
    if (x[i].is_zero()) continue;
    for (int j = 0; j < sp.n; ++j) r += x[i] * sp.gram(i, j) * y[j];
  }
  return r;
}

// Canonical column echelon form of a full-rank column span: lower triangular,
// pivots p^{v_i}, sub-pivot entries reduced mod the pivot of their row.
inline Mat hnf_columns(Mat W, int guard = kPrecGuard) {
  const RingCtx& R = W.ctx();
  int n = W.rows(), k = W.cols();
  std::vector<int> piv(n, 0);
  for (int t = 0; t < n; ++t) {
    int bj = -1, bv = R.m + 1;
    for (int j = t; j < k; ++j) {
      int v = W(t, j).valuation();
      if (v < bv) { bv = v; bj = j; }
    }
    if (bv > R.m - guard)
      throw precision_error("hnf: pivot valuation exceeds precision guard");
    if (bj != t)
      for (int i = 0; i < n; ++i) std::swap(W(i, t), W(i, bj));
    RingElem uinv = W(t, t).div_p(bv).inv();
    for (int i = t; i < n; ++i) W(i, t) = W(i, t) * uinv;
    for (int j = t + 1; j < k; ++j) {
      if (W(t, j).is_zero()) continue;
      RingElem c = W(t, j).div_p(bv);
      for (int i = t; i < n; ++i) W(i, j) = W(i, j) - c * W(i, t);
    }
    piv[t] = bv;
  }
  // reduce entries left of each pivot mod the pivot
  for (int t = 1; t < n; ++t) {
    i64 pv = R.ppow(piv[t]);
    (void)pv;
    for (int j = 0; j < t; ++j) {
      RingElem rem = W(t, j).mod_p(piv[t]);
      RingElem q = (W(t, j) - rem).div_p(piv[t]);
      if (q.is_zero()) continue;
      for (int i = t; i < n; ++i) W(i, j) = W(i, j) - q * W(i, t);
    }
  }
  return W.block(0, 0, n, n);
}

class Lattice {
 public:
  Lattice() = default;

  // p^scale times the column span of gens (n x k, k >= n, full rank)
  Lattice(const SympSpace& sp, const Mat& gens, int scale = 0)
      : sp_(&sp), scale_(scale) {
    basis_ = hnf_columns(gens);
    int t = basis_.min_valuation();
    if (t > 0) {
      basis_ = basis_.div_p(t);
      scale_ += t;
    }
    pivots_.resize(sp.n);
    for (int i = 0; i < sp.n; ++i) pivots_[i] = basis_(i, i).valuation();
  }

  static Lattice standard(const SympSpace& sp) {
    return Lattice(sp, Mat::identity(*sp.ctx, sp.n), 0);
  }

  // fast path for generators already in canonical echelon form; only the
  // scale normalization is applied
  static Lattice from_canonical(const SympSpace& sp, Mat c, int scale) {
    Lattice r;
    r.sp_ = &sp;
    r.scale_ = scale;
    r.basis_ = std::move(c);
    int t = r.basis_.min_valuation();
    if (t > 0) {
      r.basis_ = r.basis_.div_p(t);
      r.scale_ += t;
    }
    r.pivots_.resize(sp.n);
    for (int i = 0; i < sp.n; ++i) {
      r.pivots_[i] = r.basis_(i, i).valuation();
      if (r.pivots_[i] > sp.ctx->m - kPrecGuard)
        throw precision_error("from_canonical: pivot exceeds guard");
    }
    return r;
  }

  const SympSpace& space() const { return *sp_; }
  int scale() const { return scale_; }
  const Mat& basis() const { return basis_; }
  const std::vector<int>& pivot_vals() const { return pivots_; }

  // valuation of det of a basis, including the global scale
  int valdet() const {
    int s = scale_ * sp_->n;
    for (int v : pivots_) s += v;
    return s;
  }

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.scale_ == b.scale_ && a.basis_ == b.basis_;
  }
  friend bool operator!=(const Lattice& a, const Lattice& b) { return !(a == b); }

  Lattice scaled(int k) const {
    Lattice r = *this;
    r.scale_ += k;
    return r;
  }

  bool contains(const Lattice& o) const {
    const RingCtx& R = *sp_->ctx;
    int e0 = std::min(scale_, o.scale_);
    int souter = scale_ - e0, sinner = o.scale_ - e0;
    int n = sp_->n;
    // forward substitution against the shifted triangular basis
    Mat B = o.basis_.mul_p(sinner);
    Mat X(R, n, n);
    for (int i = 0; i < n; ++i) {
      int pv = pivots_[i] + souter;
      if (pv > R.m - kPrecGuard)
        throw precision_error("contains: shifted pivot exceeds guard");
      for (int j = 0; j < n; ++j) {
        RingElem t = B(i, j);
        for (int k2 = 0; k2 < i; ++k2) t -= basis_(i, k2).mul_p(souter) * X(k2, j);
        if (t.mod_p(pv) != RingElem::zero(R)) return false;
        X(i, j) = t.div_p(pv);
      }
    }
    return true;
  }

  // index of an inclusion: sum of elementary-divisor valuations
  friend int colength(const Lattice& inner, const Lattice& outer) {
    if (!outer.contains(inner))
      throw std::invalid_argument("colength: inclusion does not hold");
    return inner.valdet() - outer.valdet();
  }

  Lattice dual() const {
    const RingCtx& R = *sp_->ctx;
    Mat M = basis_.transpose() * sp_->gram.transpose();
    SmithDecomp s = smith(M);
    int n = sp_->n;
    int w = s.vals.back();
    Mat mid(R, n, n);
    for (int i = 0; i < n; ++i) mid(i, i) = RingElem::one(R).mul_p(w - s.vals[i]);
    Mat gens = s.right_inv * mid * s.left_inv;
    return Lattice(*sp_, gens, -scale_ - w);
  }

  friend Lattice lattice_sum(const Lattice& a, const Lattice& b) {
    int e0 = std::min(a.scale_, b.scale_);
    Mat gens = Mat::hcat(a.basis_.mul_p(a.scale_ - e0), b.basis_.mul_p(b.scale_ - e0));
    return Lattice(*a.sp_, gens, e0);
  }

  // largest common sublattice, via the dual route; debug builds cross-check
  // against the independent kernel route
  friend Lattice lattice_intersect(const Lattice& a, const Lattice& b) {
    Lattice r = lattice_sum(a.dual(), b.dual()).dual();
#ifndef NDEBUG
    if (r != lattice_intersect_kernel(a, b))
      throw std::logic_error("lattice_intersect: dual and kernel routes disagree");
#endif
    return r;
  }

  friend Lattice lattice_intersect_kernel(const Lattice& a, const Lattice& b) {
    const RingCtx& R = *a.sp_->ctx;
    int n = a.sp_->n;
    int e0 = std::min(a.scale_, b.scale_);
    Mat A1 = a.basis_.mul_p(a.scale_ - e0), B1 = b.basis_.mul_p(b.scale_ - e0);
    SmithDecomp s = smith(Mat::hcat(A1, B1));
    Mat X(R, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) X(i, j) = s.right_inv(i, n + j);
    return Lattice(*a.sp_, A1 * X, e0);
  }

  // entries fixed by sigma^t; for canonical bases this decides stability
  // under twist-t semilinear operators with identity matrix
  bool is_galois_stable(int t = 1) const {
    for (int i = 0; i < sp_->n; ++i)
      for (int j = 0; j < sp_->n; ++j)
        if (basis_(i, j).frobenius(t) != basis_(i, j)) return false;
    return true;
  }

  std::string key() const {
    std::string s = "s" + std::to_string(scale_) + "|";
    for (int i = 0; i < sp_->n; ++i)
      for (int j = 0; j < sp_->n; ++j) s += basis_(i, j).to_string();
    return s;
  }

  std::string to_string() const {
    return "p^" + std::to_string(scale_) + " * " + basis_.to_string();
  }

 private:
  const SympSpace* sp_ = nullptr;
  int scale_ = 0;
  Mat basis_;
  std::vector<int> pivots_;
};

// v |-> mat . sigma^twist(v)
struct SemilinearOp {
  const SympSpace* sp = nullptr;
  Mat mat;
  int twist = 0;

  SemilinearOp() = default;
  SemilinearOp(const SympSpace& s, Mat m, int t) : sp(&s), mat(std::move(m)) {
    int d = s.ctx->d;
    twist = ((t % d) + d) % d;
  }

  Vec apply(const Vec& v) const {
    Vec w(sp->n, RingElem::zero(*sp->ctx));
    for (int i = 0; i < sp->n; ++i)
      for (int j = 0; j < sp->n; ++j) w[i] += mat(i, j) * v[j].frobenius(twist);
    return w;
  }

  friend SemilinearOp compose(const SemilinearOp& a, const SemilinearOp& b) {
    return SemilinearOp(*a.sp, a.mat * b.mat.frobenius(a.twist), a.twist + b.twist);
  }
};

inline Lattice apply_semilinear(const SemilinearOp& op, const Lattice& L) {
  return Lattice(*op.sp, op.mat * L.basis().frobenius(op.twist), L.scale());
}

}  // namespace stratalab
