#pragma once

// Reverse-mode automatic differentiation on a per-step tape.
//
// A Var is either tracked (value lives in a Tape node) or a constant
// (value held inline). Primitives applied to constants only evaluate
// eagerly and never touch a tape; the result is recorded as a node as
// soon as any input is tracked. Nodes are appended in evaluation order,
// so the node list is already topologically sorted and the backward
// pass is a single reverse sweep.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "asmpc/error.hpp"
#include "asmpc/tensor.hpp"

namespace asmpc::ad {

class Tape;
class Var;

namespace detail {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
Var make_tracked(Tape* tape, std::size_t node);
}

class Var {
public:
    Var() = default;

    static Var constant(Tensor t) {
        Var v;
        v.cval_ = std::make_shared<Tensor>(std::move(t));
        return v;
    }
    static Var constant(double x) { return constant(Tensor::scalar(x)); }

    bool tracked() const { return tape_ != nullptr; }
    Tape* tape() const { return tape_; }
    std::size_t node() const { return node_; }

    const Tensor& value() const;
    // Gradient accumulated by the last backward(); zero tensor if untouched.
    Tensor grad() const;

private:
    friend class Tape;
    friend Var detail::make_tracked(Tape*, std::size_t);
    Tape* tape_ = nullptr;
    std::size_t node_ = detail::npos;
    std::shared_ptr<const Tensor> cval_;
};

namespace detail {
inline Var make_tracked(Tape* tape, std::size_t node) {
    Var v;
    v.tape_ = tape;
    v.node_ = node;
    return v;
}
}  // namespace detail

class Tape {
public:
    struct Node {
        Tensor value;
        Tensor grad;  // sized on first accumulation
        std::function<void(Tape&, const Tensor&)> pull;
    };

    // Tracked leaf: participates in gradients.
    Var leaf(Tensor t) {
        if (!t.all_finite()) throw NumericError("Tape::leaf: non-finite input tensor");
        return wrap(add_node(std::move(t), nullptr));
    }

    std::size_t add_node(Tensor value, std::function<void(Tape&, const Tensor&)> pull) {
        nodes_.push_back(Node{std::move(value), Tensor{}, std::move(pull)});
        return nodes_.size() - 1;
    }

    const Tensor& value(std::size_t node) const { return nodes_[node].value; }

    Tensor& grad_slot(std::size_t node) {
        Node& n = nodes_[node];
        if (n.grad.size() == 0) n.grad = Tensor::zeros(n.value.shape());
        return n.grad;
    }

    const Tensor& grad(std::size_t node) {
        return grad_slot(node);
    }

    // Reverse sweep from a scalar tracked loss. Each node is visited once,
    // in reverse construction (= reverse topological) order. A second call
    // without reset() is rejected.
    void backward(const Var& loss) {
        if (!loss.tracked() || loss.tape() != this)
            throw ContractError("backward: loss is not tracked on this tape");
        if (loss.value().size() != 1)
            throw ContractError("backward: loss must be scalar, got shape " +
                                loss.value().shape_str());
        if (backward_done_)
            throw ContractError("backward: already run on this tape; reset() first");
        backward_done_ = true;
        grad_slot(loss.node())[0] = 1.0;
        for (std::size_t i = loss.node() + 1; i-- > 0;) {
            Node& n = nodes_[i];
            if (n.pull && n.grad.size() != 0) n.pull(*this, n.grad);
        }
    }

    // Drops all nodes and gradients; the tape is rebuilt every step.
    void reset() {
        nodes_.clear();
        backward_done_ = false;
    }

    std::size_t node_count() const { return nodes_.size(); }

private:
    friend class Var;
    Var wrap(std::size_t node) {
        Var v;
        v.tape_ = this;
        v.node_ = node;
        return v;
    }

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

inline const Tensor& Var::value() const {
    if (tracked()) return tape_->value(node_);
    if (!cval_) throw ContractError("Var: empty");
    return *cval_;
}

inline Tensor Var::grad() const {
    if (!tracked()) throw ContractError("Var::grad: constant Var has no gradient");
    return tape_->grad(node_);
}

// ---------------------------------------------------------------------------
// primitive helpers

namespace detail {

inline void check_finite(const Tensor& t, const char* op) {
    if (!t.all_finite()) throw NumericError(std::string(op) + ": produced non-finite values");
}

[[noreturn]] inline void shape_error(const char* op, const Tensor& a, const Tensor& b) {
    throw ContractError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                        b.shape_str());
}

// Registers `out` on the tape of the first tracked input. `pull` receives
// the output gradient; parent ids of constants are npos and skipped by
// the accumulate helper.
inline Var emit(std::initializer_list<const Var*> inputs, Tensor out,
                std::function<void(Tape&, const Tensor&)> pull) {
    Tape* tape = nullptr;
    for (const Var* v : inputs) {
        if (!v->tracked()) continue;
        if (tape && v->tape() != tape)
            throw ContractError("autodiff: inputs live on different tapes");
        tape = v->tape();
    }
    if (!tape) return Var::constant(std::move(out));
    std::size_t id = tape->add_node(std::move(out), std::move(pull));
    return make_tracked(tape, id);
}

inline std::size_t pid(const Var& v) { return v.tracked() ? v.node() : npos; }

inline void accum(Tape& tape, std::size_t node, const Tensor& g) {
    if (node == npos) return;
    Tensor& slot = tape.grad_slot(node);
    for (std::size_t i = 0; i < g.size(); ++i) slot[i] += g[i];
}

inline void accum_at(Tape& tape, std::size_t node, std::size_t index, double g) {
    if (node == npos) return;
    tape.grad_slot(node)[index] += g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// primitives

inline Var add(const Var& a, const Var& b) {
    const Tensor &av = a.value(), &bv = b.value();
    if (!av.same_shape(bv)) detail::shape_error("add", av, bv);
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    detail::check_finite(out, "add");
    const auto pa = detail::pid(a), pb = detail::pid(b);
    return detail::emit({&a, &b}, std::move(out), [pa, pb](Tape& t, const Tensor& g) {
        detail::accum(t, pa, g);
        detail::accum(t, pb, g);
    });
}

inline Var sub(const Var& a, const Var& b) {
    const Tensor &av = a.value(), &bv = b.value();
    if (!av.same_shape(bv)) detail::shape_error("sub", av, bv);
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    detail::check_finite(out, "sub");
    const auto pa = detail::pid(a), pb = detail::pid(b);
    return detail::emit({&a, &b}, std::move(out), [pa, pb](Tape& t, const Tensor& g) {
        detail::accum(t, pa, g);
        if (pb == detail::npos) return;
        Tensor& slot = t.grad_slot(pb);
        for (std::size_t i = 0; i < g.size(); ++i) slot[i] -= g[i];
    });
}

// Elementwise product; either operand may be a scalar (size 1), which is
// the only broadcasting this library supports.
inline Var mul(const Var& a, const Var& b) {
    const Tensor &av = a.value(), &bv = b.value();
    const bool sa = av.size() == 1, sb = bv.size() == 1;
    if (!av.same_shape(bv) && !sa && !sb) detail::shape_error("mul", av, bv);

    Tensor out = sa ? bv : av;
    if (av.same_shape(bv)) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
    } else if (sa) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[0] * bv[i];
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[0];
    }
    detail::check_finite(out, "mul");
    const auto pa = detail::pid(a), pb = detail::pid(b);
    const bool elem = av.same_shape(bv);
    Tensor ac = av, bc = bv;
    return detail::emit({&a, &b}, std::move(out),
                        [pa, pb, ac, bc, elem, sa](Tape& t, const Tensor& g) {
                            if (elem) {
                                if (pa != detail::npos) {
                                    Tensor& s = t.grad_slot(pa);
                                    for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i] * bc[i];
                                }
                                if (pb != detail::npos) {
                                    Tensor& s = t.grad_slot(pb);
                                    for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i] * ac[i];
                                }
                            } else if (sa) {  // scalar a times tensor b
                                if (pa != detail::npos) {
                                    double acc = 0;
                                    for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * bc[i];
                                    detail::accum_at(t, pa, 0, acc);
                                }
                                if (pb != detail::npos) {
                                    Tensor& s = t.grad_slot(pb);
                                    for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i] * ac[0];
                                }
                            } else {  // tensor a times scalar b
                                if (pa != detail::npos) {
                                    Tensor& s = t.grad_slot(pa);
                                    for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i] * bc[0];
                                }
                                if (pb != detail::npos) {
                                    double acc = 0;
                                    for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * ac[i];
                                    detail::accum_at(t, pb, 0, acc);
                                }
                            }
                        });
}

// Elementwise quotient; the divisor may be a scalar (size 1).
inline Var div(const Var& a, const Var& b) {
    const Tensor &av = a.value(), &bv = b.value();
    const bool sb = bv.size() == 1;
    if (!av.same_shape(bv) && !sb) detail::shape_error("div", av, bv);
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] / bv[sb ? 0 : i];
    detail::check_finite(out, "div");
    const auto pa = detail::pid(a), pb = detail::pid(b);
    Tensor ac = av, bc = bv;
    return detail::emit({&a, &b}, std::move(out), [pa, pb, ac, bc, sb](Tape& t, const Tensor& g) {
        if (pa != detail::npos) {
            Tensor& s = t.grad_slot(pa);
            for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i] / bc[sb ? 0 : i];
        }
        if (pb != detail::npos) {
            if (sb) {
                double acc = 0;
                for (std::size_t i = 0; i < g.size(); ++i)
                    acc -= g[i] * ac[i] / (bc[0] * bc[0]);
                detail::accum_at(t, pb, 0, acc);
            } else {
                Tensor& s = t.grad_slot(pb);
                for (std::size_t i = 0; i < g.size(); ++i)
                    s[i] -= g[i] * ac[i] / (bc[i] * bc[i]);
            }
        }
    });
}

inline Var neg(const Var& a) {
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -out[i];
    const auto pa = detail::pid(a);
    return detail::emit({&a}, std::move(out), [pa](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        for (std::size_t i = 0; i < g.size(); ++i) s[i] -= g[i];
    });
}

inline Var scale(const Var& a, double c) {
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
    detail::check_finite(out, "scale");
    const auto pa = detail::pid(a);
    return detail::emit({&a}, std::move(out), [pa, c](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        for (std::size_t i = 0; i < g.size(); ++i) s[i] += c * g[i];
    });
}

inline Var add_const(const Var& a, double c) {
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c;
    detail::check_finite(out, "add_const");
    const auto pa = detail::pid(a);
    return detail::emit({&a}, std::move(out),
                        [pa](Tape& t, const Tensor& g) { detail::accum(t, pa, g); });
}

// (m,k) x (k,n) -> (m,n), or (m,k) x (k) -> (m).
inline Var matmul(const Var& a, const Var& b) {
    const Tensor &av = a.value(), &bv = b.value();
    if (av.rank() != 2 || (bv.rank() != 1 && bv.rank() != 2))
        detail::shape_error("matmul", av, bv);
    const std::size_t m = av.dim(0), k = av.dim(1);
    const bool vec = bv.rank() == 1;
    const std::size_t n = vec ? 1 : bv.dim(1);
    if (bv.dim(0) != k) detail::shape_error("matmul", av, bv);

    Tensor out(vec ? std::vector<std::size_t>{m} : std::vector<std::size_t>{m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0;
            for (std::size_t p = 0; p < k; ++p) acc += av[i * k + p] * bv[p * n + j];
            out[i * n + j] = acc;
        }
    detail::check_finite(out, "matmul");
    const auto pa = detail::pid(a), pb = detail::pid(b);
    Tensor ac = av, bc = bv;
    return detail::emit({&a, &b}, std::move(out),
                        [pa, pb, ac, bc, m, n, k](Tape& t, const Tensor& g) {
                            if (pa != detail::npos) {  // dA = g . B^T
                                Tensor& s = t.grad_slot(pa);
                                for (std::size_t i = 0; i < m; ++i)
                                    for (std::size_t p = 0; p < k; ++p) {
                                        double acc = 0;
                                        for (std::size_t j = 0; j < n; ++j)
                                            acc += g[i * n + j] * bc[p * n + j];
                                        s[i * k + p] += acc;
                                    }
                            }
                            if (pb != detail::npos) {  // dB = A^T . g
                                Tensor& s = t.grad_slot(pb);
                                for (std::size_t p = 0; p < k; ++p)
                                    for (std::size_t j = 0; j < n; ++j) {
                                        double acc = 0;
                                        for (std::size_t i = 0; i < m; ++i)
                                            acc += ac[i * k + p] * g[i * n + j];
                                        s[p * n + j] += acc;
                                    }
                            }
                        });
}

// ELU with alpha = 1.
inline Var elu(const Var& a) {
    const Tensor& av = a.value();
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = av[i] > 0.0 ? av[i] : std::expm1(av[i]);
    detail::check_finite(out, "elu");
    const auto pa = detail::pid(a);
    Tensor ac = av;
    return detail::emit({&a}, std::move(out), [pa, ac](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        for (std::size_t i = 0; i < g.size(); ++i)
            s[i] += g[i] * (ac[i] > 0.0 ? 1.0 : std::exp(ac[i]));
    });
}

inline Var relu(const Var& a) {
    const Tensor& av = a.value();
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] > 0.0 ? av[i] : 0.0;
    const auto pa = detail::pid(a);
    Tensor ac = av;
    return detail::emit({&a}, std::move(out), [pa, ac](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        for (std::size_t i = 0; i < g.size(); ++i) s[i] += ac[i] > 0.0 ? g[i] : 0.0;
    });
}

// Numerically stable log(1 + e^x); gradient is the logistic sigmoid.
inline Var softplus(const Var& a) {
    const Tensor& av = a.value();
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::max(av[i], 0.0) + std::log1p(std::exp(-std::abs(av[i])));
    detail::check_finite(out, "softplus");
    const auto pa = detail::pid(a);
    Tensor ac = av;
    return detail::emit({&a}, std::move(out), [pa, ac](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i] / (1.0 + std::exp(-ac[i]));
    });
}

inline Var square(const Var& a) {
    const Tensor& av = a.value();
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * av[i];
    detail::check_finite(out, "square");
    const auto pa = detail::pid(a);
    Tensor ac = av;
    return detail::emit({&a}, std::move(out), [pa, ac](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        for (std::size_t i = 0; i < g.size(); ++i) s[i] += 2.0 * ac[i] * g[i];
    });
}

inline Var exp(const Var& a) {
    const Tensor& av = a.value();
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(av[i]);
    detail::check_finite(out, "exp");
    const auto pa = detail::pid(a);
    Tensor oc = out;
    return detail::emit({&a}, std::move(out), [pa, oc](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i] * oc[i];
    });
}

inline Var log(const Var& a) {
    const Tensor& av = a.value();
    Tensor out = av;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(av[i] > 0.0)) throw NumericError("log: non-positive input");
        out[i] = std::log(av[i]);
    }
    detail::check_finite(out, "log");
    const auto pa = detail::pid(a);
    Tensor ac = av;
    return detail::emit({&a}, std::move(out), [pa, ac](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        for (std::size_t i = 0; i < g.size(); ++i) s[i] += g[i] / ac[i];
    });
}

inline Var sum(const Var& a) {
    const Tensor& av = a.value();
    double acc = 0;
    for (std::size_t i = 0; i < av.size(); ++i) acc += av[i];
    Tensor out = Tensor::scalar(acc);
    detail::check_finite(out, "sum");
    const auto pa = detail::pid(a);
    const std::size_t n = av.size();
    return detail::emit({&a}, std::move(out), [pa, n](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        for (std::size_t i = 0; i < n; ++i) s[i] += g[0];
    });
}

inline Var mean(const Var& a) {
    const Tensor& av = a.value();
    if (av.size() == 0) throw ContractError("mean: empty tensor");
    double acc = 0;
    for (std::size_t i = 0; i < av.size(); ++i) acc += av[i];
    Tensor out = Tensor::scalar(acc / static_cast<double>(av.size()));
    detail::check_finite(out, "mean");
    const auto pa = detail::pid(a);
    const std::size_t n = av.size();
    return detail::emit({&a}, std::move(out), [pa, n](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        const double gi = g[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) s[i] += gi;
    });
}

// Flattens every input and concatenates into one rank-1 vector.
inline Var concat(const std::vector<Var>& parts) {
    if (parts.empty()) throw ContractError("concat: no inputs");
    std::size_t total = 0;
    for (const Var& p : parts) total += p.value().size();
    Tensor out({total});
    std::size_t off = 0;
    for (const Var& p : parts)
        for (std::size_t i = 0; i < p.value().size(); ++i) out[off++] = p.value()[i];

    Tape* tape = nullptr;
    for (const Var& p : parts)
        if (p.tracked()) tape = p.tape();
    if (!tape) return Var::constant(std::move(out));

    std::vector<std::pair<std::size_t, std::size_t>> spans;  // (parent id, count)
    for (const Var& p : parts) spans.emplace_back(detail::pid(p), p.value().size());
    std::size_t id = tape->add_node(std::move(out), [spans](Tape& t, const Tensor& g) {
        std::size_t off = 0;
        for (auto [pid, n] : spans) {
            if (pid != detail::npos) {
                Tensor& s = t.grad_slot(pid);
                for (std::size_t i = 0; i < n; ++i) s[i] += g[off + i];
            }
            off += n;
        }
    });
    return detail::make_tracked(tape, id);
}

// Contiguous slice [offset, offset+len) of the flattened tensor; rank-1 result.
inline Var slice(const Var& a, std::size_t offset, std::size_t len) {
    const Tensor& av = a.value();
    if (offset + len > av.size())
        throw ContractError("slice: range [" + std::to_string(offset) + "," +
                            std::to_string(offset + len) + ") exceeds size " +
                            std::to_string(av.size()));
    Tensor out({len});
    for (std::size_t i = 0; i < len; ++i) out[i] = av[offset + i];
    const auto pa = detail::pid(a);
    return detail::emit({&a}, std::move(out), [pa, offset, len](Tape& t, const Tensor& g) {
        if (pa == detail::npos) return;
        Tensor& s = t.grad_slot(pa);
        for (std::size_t i = 0; i < len; ++i) s[offset + i] += g[i];
    });
}

inline Var reshape(const Var& a, std::vector<std::size_t> shape) {
    const Tensor& av = a.value();
    Tensor out(std::move(shape), av.values());
    const auto pa = detail::pid(a);
    return detail::emit({&a}, std::move(out),
                        [pa](Tape& t, const Tensor& g) { detail::accum(t, pa, g); });
}

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator-(const Var& a) { return neg(a); }

}  // namespace asmpc::ad
