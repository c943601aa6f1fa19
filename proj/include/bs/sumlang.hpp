#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bs/poly.hpp"

namespace bs {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error("parse error at " + std::to_string(pos) + ": " + what), pos_(pos) {}
    std::size_t pos() const { return pos_; }

private:
    std::size_t pos_;
};

class BindingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Integer affine form sum c_i * x_i + k over index ids.
struct Affine {
    std::map<int, long> c;
    long k = 0;

    static Affine constant(long v) { return Affine{{}, v}; }
    static Affine var(int id, long coef = 1);

    bool is_const() const { return c.empty(); }
    long coef(int id) const;
    long eval(const std::vector<long>& env) const;
    Affine operator+(const Affine& o) const;
    Affine operator-(const Affine& o) const;
    Affine operator*(long s) const;
    Affine subst(const std::map<int, Affine>& m) const;
    bool operator==(const Affine& o) const { return c == o.c && k == o.k; }
    bool operator<(const Affine& o) const { return c != o.c ? c < o.c : k < o.k; }
    std::string to_string(const std::vector<std::string>& names) const;
};

enum class NodeKind {
    Delta,
    Heaviside,
    Geometric,
    Binom,
    BinomNat,
    BinomRev,
    Motzkin,
    Poly,
    Constant,
    Sum,
    Product,
    DirectedSum,
    StdSum,
    InfSum,
    Subst,
};

struct Node;
using NodeRef = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    int id;                     // unique per process
    std::vector<Affine> args;   // atom arguments, or sum bounds (lower, upper)
    Q value;                    // Constant value, Geometric base
    std::vector<NodeRef> kids;  // operands or body
    int index = -1;             // bound index of a sum
    std::map<int, Affine> repl; // Subst replacements
    std::vector<int> free;      // sorted free index ids
};

// Construction helpers; they compute ids and free index sets.
NodeRef make_atom(NodeKind kind, std::vector<Affine> args, Q value = Q(0));
NodeRef make_constant(const Q& v);
NodeRef make_geometric(const Q& base, const Affine& exponent);
NodeRef make_sum(std::vector<NodeRef> kids);
NodeRef make_product(std::vector<NodeRef> kids);
NodeRef make_bounded_sum(NodeKind kind, int index, const Affine& lo, const Affine& hi, NodeRef body);
NodeRef make_inf_sum(int index, NodeRef body);
NodeRef make_subst(std::map<int, Affine> repl, NodeRef body);

// A binomial sum with its index table. Ids 0..params-1 are the free parameters.
struct BSExpr {
    NodeRef root;
    std::vector<std::string> names;
    int params = 0;

    int index_count() const { return static_cast<int>(names.size()); }
    std::vector<std::string> param_names() const {
        return std::vector<std::string>(names.begin(), names.begin() + params);
    }
};

BSExpr parse(const std::string& text);
// Parse with a fixed parameter list (order matters).
BSExpr parse(const std::string& text, const std::vector<std::string>& params);
std::string to_string(const BSExpr& e);

// Sufficient interval for a summation index: lower = max ceil(num/div),
// upper = min floor(num/div).
struct SupportBound {
    std::vector<std::pair<long, Affine>> lower, upper;
    bool known() const { return !upper.empty() && !lower.empty(); }
};

// Constraints a >= 0 that hold wherever the node is nonzero.
std::vector<Affine> support_constraints(const NodeRef& n);
SupportBound infer_support(const BSExpr& e, int index);

class Evaluator {
public:
    explicit Evaluator(const BSExpr& e) : e_(e) {}
    Q eval(const std::vector<long>& n);

private:
    const BSExpr& e_;
    std::map<std::pair<int, std::vector<long>>, Q> memo_;
    std::map<int, SupportBound> bounds_;
    std::map<std::pair<long, long>, Z> binom_;
    std::map<long, Z> motzkin_;

    Q go(const NodeRef& n, std::vector<long>& env);
    Z binom(long n, long k);
    Z motzkin(long n);
};

Q eval_oracle(const BSExpr& e, const std::vector<long>& n);

}  // namespace bs
