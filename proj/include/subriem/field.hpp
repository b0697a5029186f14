#pragma once

// Scalar and vector fields as lazily evaluated jet-valued expression graphs.
//
// A ScalarField maps a base point to a Jet of any requested order; nodes are
// immutable and shared, so graphs are cheap to compose and safe to evaluate
// from many threads. Per-point evaluation goes through an EvalContext that
// memoizes each node at the highest order requested so far; derivative
// operators (apply_vf, lie_bracket) request one extra order from their
// operands, and any request beyond the context's maximum order is a hard
// order-exhaustion error rather than a silent truncation.

#include <array>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subriem/errors.hpp"
#include "subriem/expr.hpp"
#include "subriem/jet.hpp"

namespace subriem {

class FieldNode;

class EvalContext {
public:
    EvalContext(std::vector<double> point, int max_order = kDefaultMaxOrder)
        : point_(std::move(point)), max_order_(max_order) {}

    const std::vector<double>& point() const { return point_; }
    int max_order() const { return max_order_; }

    // Sub-context over the first `base_dim` coordinates (base manifold under a
    // cotangent-bundle point). Created lazily, shares the maximum order.
    EvalContext& base(int base_dim) {
        if (!base_) {
            std::vector<double> q(point_.begin(), point_.begin() + base_dim);
            base_ = std::make_unique<EvalContext>(std::move(q), max_order_);
        }
        return *base_;
    }

    std::unordered_map<const void*, Jet>& memo() { return memo_; }
    std::unordered_map<const void*, std::pair<int, std::vector<Jet>>>& group_memo() {
        return group_memo_;
    }

    // Memo entries are keyed by node address, so every memoized node must be
    // kept alive for the context's lifetime or a recycled allocation could
    // alias a dead key.
    void retain(std::shared_ptr<const void> owner) { retained_.push_back(std::move(owner)); }

private:
    std::vector<double> point_;
    int max_order_;
    std::unordered_map<const void*, Jet> memo_;
    std::unordered_map<const void*, std::pair<int, std::vector<Jet>>> group_memo_;
    std::vector<std::shared_ptr<const void>> retained_;
    std::unique_ptr<EvalContext> base_;
};

class FieldNode : public std::enable_shared_from_this<FieldNode> {
public:
    explicit FieldNode(int dim) : dim_(dim) {}
    virtual ~FieldNode() = default;
    int dim() const { return dim_; }

    Jet eval(EvalContext& ctx, int order) const {
        if (order > ctx.max_order())
            fail(ErrorKind::order_exhausted,
                 "jet order " + std::to_string(order) + " exceeds configured maximum " +
                     std::to_string(ctx.max_order()));
        auto& memo = ctx.memo();
        auto it = memo.find(this);
        if (it != memo.end() && it->second.order() >= order) return it->second.truncated(order);
        Jet j = eval_impl(ctx, order);
        if (it == memo.end()) ctx.retain(shared_from_this());
        memo.insert_or_assign(this, j);
        return j;
    }

protected:
    virtual Jet eval_impl(EvalContext& ctx, int order) const = 0;

private:
    int dim_;
};

using FieldPtr = std::shared_ptr<const FieldNode>;

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(FieldPtr node) : node_(std::move(node)) {}

    bool valid() const { return node_ != nullptr; }
    int dim() const { return node_->dim(); }
    const FieldPtr& node() const { return node_; }

    Jet eval(EvalContext& ctx, int order) const { return node_->eval(ctx, order); }

    Jet jet_at(std::span<const double> point, int order,
               int max_order = kDefaultMaxOrder) const {
        EvalContext ctx(std::vector<double>(point.begin(), point.end()), max_order);
        return eval(ctx, order);
    }

    double value_at(std::span<const double> point, int max_order = kDefaultMaxOrder) const {
        return jet_at(point, 0, max_order).value();
    }

    static ScalarField constant(int dim, double v);
    static ScalarField coordinate(int dim, int index);
    static ScalarField from_expr(Expr e);

private:
    FieldPtr node_;
};

namespace detail {

class ConstNode final : public FieldNode {
public:
    ConstNode(int dim, double v) : FieldNode(dim), v_(v) {}
    Jet eval_impl(EvalContext& ctx, int order) const override {
        return Jet::constant(dim(), order, v_);
    }

private:
    double v_;
};

class CoordNode final : public FieldNode {
public:
    CoordNode(int dim, int index) : FieldNode(dim), index_(index) {}
    Jet eval_impl(EvalContext& ctx, int order) const override {
        return Jet::variable(dim(), order, index_, ctx.point()[static_cast<std::size_t>(index_)]);
    }

private:
    int index_;
};

class ExprFieldNode final : public FieldNode {
public:
    explicit ExprFieldNode(Expr e) : FieldNode(e.dim()), expr_(std::move(e)) {}
    Jet eval_impl(EvalContext& ctx, int order) const override {
        return eval_jet(expr_, ctx.point(), order);
    }

private:
    Expr expr_;
};

enum class BinOp { add, sub, mul, div };

class BinNode final : public FieldNode {
public:
    BinNode(BinOp op, ScalarField a, ScalarField b)
        : FieldNode(a.dim()), op_(op), a_(std::move(a)), b_(std::move(b)) {
        if (a_.dim() != b_.dim()) fail(ErrorKind::domain, "field dimension mismatch");
    }
    Jet eval_impl(EvalContext& ctx, int order) const override {
        Jet x = a_.eval(ctx, order);
        Jet y = b_.eval(ctx, order);
        switch (op_) {
            case BinOp::add: return x + y;
            case BinOp::sub: return x - y;
            case BinOp::mul: return x * y;
            case BinOp::div: return x / y;
        }
        fail(ErrorKind::domain, "corrupt field node");
    }

private:
    BinOp op_;
    ScalarField a_, b_;
};

class ScaleAddNode final : public FieldNode {
public:
    ScaleAddNode(double scale, ScalarField a, double shift)
        : FieldNode(a.dim()), scale_(scale), shift_(shift), a_(std::move(a)) {}
    Jet eval_impl(EvalContext& ctx, int order) const override {
        return scale_ * a_.eval(ctx, order) + shift_;
    }

private:
    double scale_, shift_;
    ScalarField a_;
};

class FunNode final : public FieldNode {
public:
    FunNode(Fun f, ScalarField a) : FieldNode(a.dim()), f_(f), a_(std::move(a)) {}
    Jet eval_impl(EvalContext& ctx, int order) const override {
        Jet u = a_.eval(ctx, order);
        switch (f_) {
            case Fun::sin: return sin(u);
            case Fun::cos: return cos(u);
            case Fun::tan: return tan(u);
            case Fun::exp: return exp(u);
            case Fun::log: return log(u);
            case Fun::sqrt: return sqrt(u);
            case Fun::sinh: return sinh(u);
            case Fun::cosh: return cosh(u);
            case Fun::tanh: return tanh(u);
            case Fun::atan: return atan(u);
        }
        fail(ErrorKind::domain, "corrupt field node");
    }

private:
    Fun f_;
    ScalarField a_;
};

class PowIntNode final : public FieldNode {
public:
    PowIntNode(ScalarField a, int n) : FieldNode(a.dim()), a_(std::move(a)), n_(n) {}
    Jet eval_impl(EvalContext& ctx, int order) const override {
        return pow_int(a_.eval(ctx, order), n_);
    }

private:
    ScalarField a_;
    int n_;
};

class PartialNode final : public FieldNode {
public:
    PartialNode(ScalarField a, int var) : FieldNode(a.dim()), a_(std::move(a)), var_(var) {}
    Jet eval_impl(EvalContext& ctx, int order) const override {
        return a_.eval(ctx, order + 1).partial(var_);
    }

private:
    ScalarField a_;
    int var_;
};

// Injects a field over the first base_dim coordinates into a larger space.
class PullbackNode final : public FieldNode {
public:
    PullbackNode(ScalarField base, int dim) : FieldNode(dim), base_(std::move(base)) {}
    Jet eval_impl(EvalContext& ctx, int order) const override {
        Jet b = base_.eval(ctx.base(base_.dim()), order);
        const auto& map = inject_map(base_.dim(), dim(), order);
        Jet out(dim(), order);
        for (std::size_t i = 0; i < b.size(); ++i) out.raw(map[i]) = b.raw(i);
        return out;
    }

private:
    ScalarField base_;
};

}  // namespace detail

inline ScalarField ScalarField::constant(int dim, double v) {
    return ScalarField(std::make_shared<detail::ConstNode>(dim, v));
}
inline ScalarField ScalarField::coordinate(int dim, int index) {
    return ScalarField(std::make_shared<detail::CoordNode>(dim, index));
}
inline ScalarField ScalarField::from_expr(Expr e) {
    return ScalarField(std::make_shared<detail::ExprFieldNode>(std::move(e)));
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return ScalarField(std::make_shared<detail::BinNode>(detail::BinOp::add, a, b));
}
inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return ScalarField(std::make_shared<detail::BinNode>(detail::BinOp::sub, a, b));
}
inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    return ScalarField(std::make_shared<detail::BinNode>(detail::BinOp::mul, a, b));
}
inline ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    return ScalarField(std::make_shared<detail::BinNode>(detail::BinOp::div, a, b));
}
inline ScalarField operator*(double s, const ScalarField& a) {
    return ScalarField(std::make_shared<detail::ScaleAddNode>(s, a, 0.0));
}
inline ScalarField operator*(const ScalarField& a, double s) { return s * a; }
inline ScalarField operator+(const ScalarField& a, double s) {
    return ScalarField(std::make_shared<detail::ScaleAddNode>(1.0, a, s));
}
inline ScalarField operator+(double s, const ScalarField& a) { return a + s; }
inline ScalarField operator-(const ScalarField& a, double s) { return a + (-s); }
inline ScalarField operator-(double s, const ScalarField& a) {
    return ScalarField(std::make_shared<detail::ScaleAddNode>(-1.0, a, s));
}
inline ScalarField operator-(const ScalarField& a) { return -1.0 * a; }

inline ScalarField apply_fun(Fun f, const ScalarField& a) {
    return ScalarField(std::make_shared<detail::FunNode>(f, a));
}
inline ScalarField sqrt(const ScalarField& a) { return apply_fun(Fun::sqrt, a); }
inline ScalarField pow_int(const ScalarField& a, int n) {
    return ScalarField(std::make_shared<detail::PowIntNode>(a, n));
}
inline ScalarField partial(const ScalarField& a, int var) {
    return ScalarField(std::make_shared<detail::PartialNode>(a, var));
}
inline ScalarField pullback(const ScalarField& base, int dim) {
    return ScalarField(std::make_shared<detail::PullbackNode>(base, dim));
}

// First-order differential operator sum_i X^i d/dx_i.
class VectorFieldJ {
public:
    VectorFieldJ() = default;
    explicit VectorFieldJ(std::vector<ScalarField> comps) : c_(std::move(comps)) {}

    int dim() const { return static_cast<int>(c_.size()); }
    const ScalarField& comp(int i) const { return c_[static_cast<std::size_t>(i)]; }
    const std::vector<ScalarField>& comps() const { return c_; }

    std::vector<double> value_at(EvalContext& ctx) const {
        std::vector<double> v(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) v[i] = c_[i].eval(ctx, 0).value();
        return v;
    }

private:
    std::vector<ScalarField> c_;
};

namespace detail {

class VfApplyNode final : public FieldNode {
public:
    VfApplyNode(VectorFieldJ x, ScalarField f)
        : FieldNode(f.dim()), x_(std::move(x)), f_(std::move(f)) {
        if (x_.dim() != f_.dim()) fail(ErrorKind::domain, "vector field / scalar field dimension mismatch");
    }
    Jet eval_impl(EvalContext& ctx, int order) const override {
        Jet fj = f_.eval(ctx, order + 1);
        Jet acc(dim(), order);
        for (int i = 0; i < dim(); ++i) {
            Jet xi = x_.comp(i).eval(ctx, order);
            acc = acc + xi * fj.partial(i);
        }
        return acc;
    }

private:
    VectorFieldJ x_;
    ScalarField f_;
};

}  // namespace detail

inline ScalarField apply_vf(const VectorFieldJ& x, const ScalarField& f) {
    return ScalarField(std::make_shared<detail::VfApplyNode>(x, f));
}

inline VectorFieldJ lie_bracket(const VectorFieldJ& x, const VectorFieldJ& y) {
    if (x.dim() != y.dim()) fail(ErrorKind::domain, "vector field dimension mismatch");
    std::vector<ScalarField> comps;
    comps.reserve(static_cast<std::size_t>(x.dim()));
    for (int i = 0; i < x.dim(); ++i)
        comps.push_back(apply_vf(x, y.comp(i)) - apply_vf(y, x.comp(i)));
    return VectorFieldJ(std::move(comps));
}

inline VectorFieldJ operator+(const VectorFieldJ& a, const VectorFieldJ& b) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < a.dim(); ++i) comps.push_back(a.comp(i) + b.comp(i));
    return VectorFieldJ(std::move(comps));
}
inline VectorFieldJ operator-(const VectorFieldJ& a, const VectorFieldJ& b) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < a.dim(); ++i) comps.push_back(a.comp(i) - b.comp(i));
    return VectorFieldJ(std::move(comps));
}
inline VectorFieldJ operator*(const ScalarField& s, const VectorFieldJ& a) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < a.dim(); ++i) comps.push_back(s * a.comp(i));
    return VectorFieldJ(std::move(comps));
}
inline VectorFieldJ operator*(double s, const VectorFieldJ& a) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < a.dim(); ++i) comps.push_back(s * a.comp(i));
    return VectorFieldJ(std::move(comps));
}

// Pointwise 3x3 linear solve over jets, shared by the Reeb field, the dual
// co-frame, and structure-constant extraction. Solutions for all right-hand
// sides are computed together and cached per (point, order).
class LinSolve3 : public std::enable_shared_from_this<LinSolve3> {
public:
    LinSolve3(std::array<std::array<ScalarField, 3>, 3> a,
              std::vector<std::array<ScalarField, 3>> rhs, std::string what)
        : a_(std::move(a)), rhs_(std::move(rhs)), what_(std::move(what)) {}

    int nrhs() const { return static_cast<int>(rhs_.size()); }
    int dim() const { return a_[0][0].dim(); }
    const std::string& what() const { return what_; }

    const std::vector<Jet>& solve(EvalContext& ctx, int order) const {
        auto& memo = ctx.group_memo();
        auto it = memo.find(this);
        if (it != memo.end() && it->second.first >= order) return it->second.second;
        if (it == memo.end()) ctx.retain(shared_from_this());

        // Augmented jet-valued Gaussian elimination with partial pivoting on
        // the constant terms.
        std::array<std::array<Jet, 3>, 3> A;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(ctx, order);
        std::vector<std::array<Jet, 3>> B(rhs_.size());
        for (std::size_t r = 0; r < rhs_.size(); ++r)
            for (int i = 0; i < 3; ++i) B[r][static_cast<std::size_t>(i)] = rhs_[r][static_cast<std::size_t>(i)].eval(ctx, order);

        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::fabs(A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)].value()) >
                    std::fabs(A[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)].value()))
                    piv = r;
            if (A[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)].value() == 0.0)
                fail(ErrorKind::numeric, "singular system while solving " + what_);
            if (piv != col) {
                std::swap(A[static_cast<std::size_t>(piv)], A[static_cast<std::size_t>(col)]);
                for (auto& b : B) std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
            }
            const Jet inv_piv = recip(A[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)]);
            for (int r = col + 1; r < 3; ++r) {
                Jet f = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] * inv_piv;
                for (int j = col; j < 3; ++j)
                    A[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
                        A[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] - f * A[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
                for (auto& b : B)
                    b[static_cast<std::size_t>(r)] = b[static_cast<std::size_t>(r)] - f * b[static_cast<std::size_t>(col)];
            }
        }
        std::vector<Jet> out(rhs_.size() * 3);
        for (std::size_t r = 0; r < rhs_.size(); ++r) {
            std::array<Jet, 3> x;
            for (int ii = 2; ii >= 0; --ii) {
                Jet s = B[r][static_cast<std::size_t>(ii)];
                for (int j = ii + 1; j < 3; ++j)
                    s = s - A[static_cast<std::size_t>(ii)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
                x[static_cast<std::size_t>(ii)] = s / A[static_cast<std::size_t>(ii)][static_cast<std::size_t>(ii)];
            }
            for (int i = 0; i < 3; ++i) out[r * 3 + static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
        }
        auto& slot = memo[this];
        slot = {order, std::move(out)};
        return slot.second;
    }

private:
    std::array<std::array<ScalarField, 3>, 3> a_;
    std::vector<std::array<ScalarField, 3>> rhs_;
    std::string what_;
};

namespace detail {

class SolveComponentNode final : public FieldNode {
public:
    SolveComponentNode(std::shared_ptr<const LinSolve3> core, int rhs, int comp)
        : FieldNode(core->dim()), core_(std::move(core)), rhs_(rhs), comp_(comp) {}
    Jet eval_impl(EvalContext& ctx, int order) const override {
        const auto& sol = core_->solve(ctx, order);
        return sol[static_cast<std::size_t>(rhs_ * 3 + comp_)].truncated(order);
    }

private:
    std::shared_ptr<const LinSolve3> core_;
    int rhs_, comp_;
};

}  // namespace detail

// All solution components of a pointwise 3x3 solve, as fields: result[r][i]
// is component i of the solution for right-hand side r.
inline std::vector<std::array<ScalarField, 3>> solve_fields(
    std::array<std::array<ScalarField, 3>, 3> a, std::vector<std::array<ScalarField, 3>> rhs,
    std::string what) {
    auto core = std::make_shared<const LinSolve3>(std::move(a), std::move(rhs), std::move(what));
    std::vector<std::array<ScalarField, 3>> out(static_cast<std::size_t>(core->nrhs()));
    for (int r = 0; r < core->nrhs(); ++r)
        for (int i = 0; i < 3; ++i)
            out[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] =
                ScalarField(std::make_shared<detail::SolveComponentNode>(core, r, i));
    return out;
}

}  // namespace subriem
