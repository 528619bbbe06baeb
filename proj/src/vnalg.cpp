#include "cpfix/vnalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cpfix/error.hpp"

namespace cpfix {

BlockStructure::BlockStructure(std::vector<std::size_t> block_dims) : dims_(std::move(block_dims)) {
    if (dims_.empty()) throw Error(ErrorKind::InvalidArgument, "block structure must be nonempty");
    for (auto n : dims_)
        if (n == 0) throw Error(ErrorKind::InvalidArgument, "block dimensions must be >= 1");
}

std::size_t BlockStructure::hilbert_dim() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{0});
}

std::size_t BlockStructure::coord_dim() const noexcept {
    std::size_t d = 0;
    for (auto n : dims_) d += n * n;
    return d;
}

std::size_t BlockStructure::coord_offset(std::size_t i) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < i; ++k) off += dims_.at(k) * dims_.at(k);
    return off;
}

AlgebraElement::AlgebraElement(BlockStructure s) : structure_(std::move(s)) {
    blocks_.reserve(structure_.num_blocks());
    for (auto n : structure_.dims()) blocks_.emplace_back(n, n);
}

AlgebraElement::AlgebraElement(BlockStructure s, std::vector<CMatrix> blocks)
    : structure_(std::move(s)), blocks_(std::move(blocks)) {
    if (blocks_.size() != structure_.num_blocks())
        throw Error(ErrorKind::ShapeMismatch, "expected " +
                                                  std::to_string(structure_.num_blocks()) +
                                                  " blocks, got " + std::to_string(blocks_.size()));
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto n = structure_.dim(i);
        if (blocks_[i].rows() != n || blocks_[i].cols() != n)
            throw Error(ErrorKind::ShapeMismatch, "block " + std::to_string(i) + " must be " +
                                                      std::to_string(n) + "x" + std::to_string(n));
    }
}

AlgebraElement AlgebraElement::identity(const BlockStructure& s) {
    std::vector<CMatrix> b;
    for (auto n : s.dims()) b.push_back(CMatrix::identity(n));
    return AlgebraElement(s, std::move(b));
}

AlgebraElement AlgebraElement::unit(const BlockStructure& s, std::size_t block, std::size_t a,
                                    std::size_t b) {
    AlgebraElement x(s);
    x.block(block)(a, b) = 1.0;
    return x;
}

AlgebraElement AlgebraElement::from_coords(const BlockStructure& s,
                                           std::span<const Complex> coords) {
    if (coords.size() != s.coord_dim())
        throw Error(ErrorKind::ShapeMismatch, "coordinate vector length");
    std::vector<CMatrix> b;
    std::size_t off = 0;
    for (auto n : s.dims()) {
        b.emplace_back(n, n, std::vector<Complex>(coords.begin() + off, coords.begin() + off + n * n));
        off += n * n;
    }
    return AlgebraElement(s, std::move(b));
}

std::vector<Complex> AlgebraElement::coords() const {
    std::vector<Complex> c;
    c.reserve(structure_.coord_dim());
    for (const auto& b : blocks_) c.insert(c.end(), b.data().begin(), b.data().end());
    return c;
}

AlgebraElement AlgebraElement::adjoint() const {
    std::vector<CMatrix> b;
    for (const auto& m : blocks_) b.push_back(m.adjoint());
    return AlgebraElement(structure_, std::move(b));
}

double AlgebraElement::norm() const {
    double m = 0.0;
    for (const auto& b : blocks_) m = std::max(m, op_norm(b));
    return m;
}

Complex AlgebraElement::trace() const {
    Complex t = 0.0;
    for (const auto& b : blocks_) t += b.trace();
    return t;
}

void AlgebraElement::check_same(const AlgebraElement& o) const {
    if (!(structure_ == o.structure_)) throw Error(ErrorKind::ShapeMismatch, "block structures differ");
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
    check_same(o);
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
    return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
    check_same(o);
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
    return *this;
}

AlgebraElement& AlgebraElement::operator*=(Complex s) {
    for (auto& b : blocks_) b *= s;
    return *this;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    a.check_same(b);
    std::vector<CMatrix> r;
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) r.push_back(a.blocks_[i] * b.blocks_[i]);
    return AlgebraElement(a.structure_, std::move(r));
}

Complex inner(const AlgebraElement& a, const AlgebraElement& b) {
    if (!(a.structure() == b.structure())) throw Error(ErrorKind::ShapeMismatch, "inner");
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.blocks().size(); ++i) s += inner(a.block(i), b.block(i));
    return s;
}

double min_eigenvalue(const AlgebraElement& a) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : a.blocks()) m = std::min(m, min_eigenvalue(b));
    return m;
}

bool is_psd(const AlgebraElement& a, double tol) { return min_eigenvalue(a) >= -tol; }

double hermitian_defect(const AlgebraElement& a) {
    double d = 0.0;
    for (const auto& b : a.blocks()) d = std::max(d, hermitian_defect(b));
    return d;
}

double frobenius_norm(const AlgebraElement& a) {
    double s = 0.0;
    for (const auto& b : a.blocks()) s += std::norm(b.frobenius_norm());
    return std::sqrt(s);
}

CMatrix embed(const AlgebraElement& x) {
    const auto& s = x.structure();
    CMatrix m(s.hilbert_dim(), s.hilbert_dim());
    std::size_t off = 0;
    for (std::size_t i = 0; i < s.num_blocks(); ++i) {
        m.set_block(off, off, x.block(i));
        off += s.dim(i);
    }
    return m;
}

namespace {

// Index of the first component with non-negligible magnitude.
std::size_t leading_index(const std::vector<Complex>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > 1e-12) return i;
    return v.size();
}

} // namespace

ProjectionElement::ProjectionElement(const AlgebraElement& p) {
    const auto& s = p.structure();
    std::vector<CMatrix> rounded;
    for (std::size_t i = 0; i < s.num_blocks(); ++i) {
        const auto& b = p.block(i);
        if (hermitian_defect(b) > 1e-6)
            throw Error(ErrorKind::NotProjection, "block " + std::to_string(i) + " not Hermitian");
        const auto e = eig_hermitian(b, 1e-6);
        std::vector<std::vector<Complex>> range;
        for (std::size_t k = 0; k < e.values.size(); ++k) {
            const double lam = e.values[k];
            if (std::abs(lam - 1.0) <= 1e-6) {
                auto v = e.vectors.col_vector(k);
                const auto lead = leading_index(v);
                if (lead < v.size()) {
                    const Complex ph = std::abs(v[lead]) / v[lead];
                    for (auto& z : v) z *= ph;
                }
                range.push_back(std::move(v));
            } else if (std::abs(lam) > 1e-6) {
                throw Error(ErrorKind::NotProjection, "block " + std::to_string(i) +
                                                          " has eigenvalue " + std::to_string(lam));
            }
        }
        std::stable_sort(range.begin(), range.end(), [](const auto& x, const auto& y) {
            const auto lx = leading_index(x), ly = leading_index(y);
            if (lx != ly) return lx < ly;
            for (std::size_t k = 0; k < x.size(); ++k) {
                if (x[k].real() != y[k].real()) return x[k].real() > y[k].real();
                if (x[k].imag() != y[k].imag()) return x[k].imag() > y[k].imag();
            }
            return false;
        });
        const auto n = s.dim(i);
        CMatrix u(n, range.size());
        for (std::size_t k = 0; k < range.size(); ++k) u.set_col(k, range[k]);
        ranks_.push_back(range.size());
        rounded.push_back(u * u.adjoint());
        isometries_.push_back(std::move(u));
    }
    p_ = AlgebraElement(s, std::move(rounded));
}

bool ProjectionElement::is_identity() const {
    for (std::size_t i = 0; i < ranks_.size(); ++i)
        if (ranks_[i] != p_.structure().dim(i)) return false;
    return true;
}

CornerEmbedding corner(const BlockStructure& structure, const ProjectionElement& p) {
    if (!(structure == p.structure()))
        throw Error(ErrorKind::ShapeMismatch, "projection lives in a different algebra");
    CornerEmbedding emb;
    emb.ambient = structure;
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < structure.num_blocks(); ++i) {
        emb.isometries.push_back(p.isometries()[i]);
        const auto r = p.ranks()[i];
        if (r == 0) {
            emb.inverse_map.push_back(std::nullopt);
        } else {
            emb.inverse_map.push_back(dims.size());
            emb.block_map.push_back(i);
            dims.push_back(r);
        }
    }
    if (dims.empty()) throw Error(ErrorKind::NotProjection, "projection is zero; corner is empty");
    emb.corner = BlockStructure(std::move(dims));
    return emb;
}

AlgebraElement compress(const CornerEmbedding& emb, const AlgebraElement& x) {
    if (!(x.structure() == emb.ambient))
        throw Error(ErrorKind::ShapeMismatch, "compress: element is not in the ambient algebra");
    std::vector<CMatrix> b;
    for (auto i : emb.block_map) {
        const auto& u = emb.isometries[i];
        b.push_back(u.adjoint() * x.block(i) * u);
    }
    return AlgebraElement(emb.corner, std::move(b));
}

AlgebraElement inject(const CornerEmbedding& emb, const AlgebraElement& y) {
    if (!(y.structure() == emb.corner))
        throw Error(ErrorKind::ShapeMismatch, "inject: element is not in the corner algebra");
    AlgebraElement x(emb.ambient);
    for (std::size_t k = 0; k < emb.block_map.size(); ++k) {
        const auto i = emb.block_map[k];
        const auto& u = emb.isometries[i];
        x.block(i) = u * y.block(k) * u.adjoint();
    }
    return x;
}

BlockStructure amplify(const BlockStructure& s, std::size_t k) {
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "amplification level must be >= 1");
    std::vector<std::size_t> d;
    for (auto n : s.dims()) d.push_back(n * k);
    return BlockStructure(std::move(d));
}

AlgebraElement amplify_element(std::span<const AlgebraElement> entries, std::size_t k) {
    if (entries.size() != k * k || k == 0)
        throw Error(ErrorKind::ShapeMismatch, "need k*k entries");
    const auto& s = entries.front().structure();
    AlgebraElement out(amplify(s, k));
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            const auto& e = entries[r * k + c];
            if (!(e.structure() == s)) throw Error(ErrorKind::ShapeMismatch, "mixed structures");
            for (std::size_t i = 0; i < s.num_blocks(); ++i) {
                const auto n = s.dim(i);
                out.block(i).set_block(r * n, c * n, e.block(i));
            }
        }
    }
    return out;
}

std::vector<AlgebraElement> compress_entrywise(const CornerEmbedding& emb,
                                               std::span<const AlgebraElement> entries) {
    std::vector<AlgebraElement> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(compress(emb, e));
    return out;
}

CornerEmbedding amplify_corner(const CornerEmbedding& emb, std::size_t k) {
    CornerEmbedding a;
    a.ambient = amplify(emb.ambient, k);
    a.corner = amplify(emb.corner, k);
    a.block_map = emb.block_map;
    a.inverse_map = emb.inverse_map;
    const CMatrix ik = CMatrix::identity(k);
    for (const auto& u : emb.isometries) a.isometries.push_back(kron(ik, u));
    return a;
}

} // namespace cpfix
