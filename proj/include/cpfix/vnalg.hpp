#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cpfix/matcore.hpp"

namespace cpfix {

/// A finite-dimensional von Neumann algebra M_{n_1} (+) ... (+) M_{n_k}.
class BlockStructure {
public:
    BlockStructure() = default;
    explicit BlockStructure(std::vector<std::size_t> block_dims);

    std::span<const std::size_t> dims() const noexcept { return dims_; }
    std::size_t num_blocks() const noexcept { return dims_.size(); }
    std::size_t dim(std::size_t i) const { return dims_.at(i); }
    /// Sum of n_i: size of the Hilbert space the algebra acts on.
    std::size_t hilbert_dim() const noexcept;
    /// Sum of n_i^2: dimension of the algebra as a vector space.
    std::size_t coord_dim() const noexcept;
    /// Offset of block i in the coordinate vector.
    std::size_t coord_offset(std::size_t i) const;

    friend bool operator==(const BlockStructure&, const BlockStructure&) = default;

private:
    std::vector<std::size_t> dims_;
};

/// Element of a multi-matrix algebra, stored block by block.
class AlgebraElement {
public:
    AlgebraElement() = default;
    explicit AlgebraElement(BlockStructure s);  // zero element
    AlgebraElement(BlockStructure s, std::vector<CMatrix> blocks);

    static AlgebraElement identity(const BlockStructure& s);
    /// Matrix unit E_{ab} inside block i.
    static AlgebraElement unit(const BlockStructure& s, std::size_t block, std::size_t a,
                               std::size_t b);
    /// Inverse of coords(): row-major block entries concatenated.
    static AlgebraElement from_coords(const BlockStructure& s, std::span<const Complex> coords);

    const BlockStructure& structure() const noexcept { return structure_; }
    std::span<const CMatrix> blocks() const noexcept { return blocks_; }
    const CMatrix& block(std::size_t i) const { return blocks_.at(i); }
    CMatrix& block(std::size_t i) { return blocks_.at(i); }

    std::vector<Complex> coords() const;
    AlgebraElement adjoint() const;
    /// Operator norm: max over blocks.
    double norm() const;
    Complex trace() const;

    AlgebraElement& operator+=(const AlgebraElement& o);
    AlgebraElement& operator-=(const AlgebraElement& o);
    AlgebraElement& operator*=(Complex s);
    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator*(AlgebraElement a, Complex s) { return a *= s; }
    friend AlgebraElement operator*(Complex s, AlgebraElement a) { return a *= s; }
    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);

private:
    void check_same(const AlgebraElement& o) const;

    BlockStructure structure_;
    std::vector<CMatrix> blocks_;
};

/// Trace inner product: sum over blocks of tr(a_i^* b_i).
Complex inner(const AlgebraElement& a, const AlgebraElement& b);
/// Smallest eigenvalue over all blocks (element must be Hermitian).
double min_eigenvalue(const AlgebraElement& a);
bool is_psd(const AlgebraElement& a, double tol);
double hermitian_defect(const AlgebraElement& a);
/// sqrt of the trace inner product <a, a>; bounds the operator norm from above.
double frobenius_norm(const AlgebraElement& a);

/// Block-diagonal matrix on H = (+) C^{n_i}.
CMatrix embed(const AlgebraElement& x);

/// Projection p = p* = p^2 in M.
class ProjectionElement {
public:
    /// Spectrally rounds p: eigenvalues within 1e-6 of {0, 1} are snapped,
    /// anything else throws NotProjection.
    explicit ProjectionElement(const AlgebraElement& p);

    const AlgebraElement& element() const noexcept { return p_; }
    const BlockStructure& structure() const noexcept { return p_.structure(); }
    /// Rank of each block.
    std::span<const std::size_t> ranks() const noexcept { return ranks_; }
    /// Isometries u_i (n_i x r_i) with u_i u_i^* = p_i.
    std::span<const CMatrix> isometries() const noexcept { return isometries_; }
    bool is_identity() const;

private:
    AlgebraElement p_;
    std::vector<std::size_t> ranks_;
    std::vector<CMatrix> isometries_;
};

/// The corner N = pMp with its identification to a multi-matrix algebra.
struct CornerEmbedding {
    BlockStructure ambient;
    BlockStructure corner;
    /// Per ambient block: isometry u_i of shape n_i x r_i (r_i may be 0).
    std::vector<CMatrix> isometries;
    /// corner block k lives in ambient block block_map[k].
    std::vector<std::size_t> block_map;
    /// ambient block i -> corner block index, or nullopt when dropped.
    std::vector<std::optional<std::size_t>> inverse_map;
};

CornerEmbedding corner(const BlockStructure& structure, const ProjectionElement& p);

/// E(x) = pxp, expressed in corner coordinates.
AlgebraElement compress(const CornerEmbedding& emb, const AlgebraElement& x);
/// y in N regarded as an element of M.
AlgebraElement inject(const CornerEmbedding& emb, const AlgebraElement& y);

/// M_k(M) as a multi-matrix algebra.
BlockStructure amplify(const BlockStructure& s, std::size_t k);

/// Assemble a k x k array (row-major) of elements of M into one element of M_k(M).
AlgebraElement amplify_element(std::span<const AlgebraElement> entries, std::size_t k);

/// Apply E entrywise to a k x k array (row-major).
std::vector<AlgebraElement> compress_entrywise(const CornerEmbedding& emb,
                                               std::span<const AlgebraElement> entries);

/// Corner embedding of p (x) I_k inside M_k(M).
CornerEmbedding amplify_corner(const CornerEmbedding& emb, std::size_t k);

} // namespace cpfix
