#include "qf/boolcompile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qf/approx.hpp"

namespace qf {

namespace {

struct CWord {
  Word re, im;
};

struct IntConst {
  std::int64_t re = 0, im = 0;
};

IntConst fixed_constant(Complex z, int mu) {
  const double scale = std::ldexp(1.0, mu);
  return {static_cast<std::int64_t>(std::trunc(z.real() * scale)),
          static_cast<std::int64_t>(std::trunc(z.imag() * scale))};
}

std::size_t insert_bit(std::size_t r, std::size_t a, std::size_t d, std::size_t slot) {
  const std::size_t shift = d - 1 - slot;
  const std::size_t high = r >> shift;
  const std::size_t low = r & ((std::size_t{1} << shift) - 1);
  return (((high << 1) | a) << shift) | low;
}

class Compiler {
 public:
  Compiler(int mu, int width) : mu_(mu), w_(width), k_(mu + width) {}

  NetlistBuilder& b() { return b_; }

  Word zero_word() { return Word(w_, b_.zero()); }

  // floor((x*y + 2^(mu-1)) / 2^mu) mod 2^W by a Baugh-Wooley array.
  Word mul(const Word& x, const Word& y) {
    std::vector<std::vector<NodeId>> cols(k_);
    auto put = [&](int c, NodeId bit) {
      if (c < k_) cols[c].push_back(bit);
    };
    const int top = w_ - 1;
    for (int i = 0; i < top; ++i)
      for (int j = 0; j < top; ++j) put(i + j, b_.and_(x[i], y[j]));
    for (int i = 0; i < top; ++i) put(i + top, b_.not_(b_.and_(x[i], y[top])));
    for (int j = 0; j < top; ++j) put(j + top, b_.not_(b_.and_(x[top], y[j])));
    put(2 * top, b_.and_(x[top], y[top]));
    put(w_, b_.one());
    put(2 * w_ - 1, b_.one());
    return finish_product(std::move(cols));
  }

  // floor((x*k + 2^(mu-1)) / 2^mu) mod 2^W for an integer constant k.
  Word kmul(const Word& x, std::int64_t k) {
    if (k == 0) return zero_word();
    std::vector<std::vector<NodeId>> cols(k_);
    Word ext(k_);
    for (int c = 0; c < k_; ++c) ext[c] = x[std::min(c, w_ - 1)];
    std::uint64_t m = static_cast<std::uint64_t>(k < 0 ? -k : k);
    if (k < 0) {
      // x*k = (~x + 1) * |k|
      for (auto& bit : ext) bit = b_.not_(bit);
      for (int c = 0; c < k_ && c < 64; ++c) {
        if ((m >> c) & 1) cols[c].push_back(b_.one());
      }
    }
    for (int s = 0; s < k_ && s < 64; ++s) {
      if (!((m >> s) & 1)) continue;
      for (int c = s; c < k_; ++c) cols[c].push_back(ext[c - s]);
    }
    return finish_product(std::move(cols));
  }

  CWord cmul(const CWord& a, const CWord& c) {
    return {b_.sub(mul(a.re, c.re), mul(a.im, c.im)), b_.add(mul(a.re, c.im), mul(a.im, c.re))};
  }

  CWord cmulc(const CWord& a, IntConst c) {
    return {b_.sub(kmul(a.re, c.re), kmul(a.im, c.im)),
            b_.add(kmul(a.re, c.im), kmul(a.im, c.re))};
  }

  CWord cadd(const CWord& a, const CWord& c) { return {b_.add(a.re, c.re), b_.add(a.im, c.im)}; }

  CWord conj(const CWord& a) { return {a.re, b_.sub(zero_word(), a.im)}; }

  // Child densities are 2x2, indexed [row][col].
  using Density = std::vector<std::vector<CWord>>;

  Density leaf(const TreeChild& ch, const std::vector<NodeId>& inputs) {
    Density rho(2, std::vector<CWord>(2, CWord{zero_word(), zero_word()}));
    NodeId v = ch.label.is_var() ? inputs.at(ch.label.index()) : b_.bit(ch.label.value());
    rho[0][0].re[mu_] = b_.not_(v);
    rho[1][1].re[mu_] = v;
    return rho;
  }

  Density gate(const TreeNode& node, const std::vector<const Density*>& kids) {
    const std::size_t d = node.arity();
    const std::size_t dim = std::size_t{1} << d;
    b_.set_category("kron");
    std::vector<std::vector<CWord>> rho(dim, std::vector<CWord>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = i; j < dim; ++j) {
        CWord p;
        for (std::size_t s = 0; s < d; ++s) {
          const std::size_t is = (i >> (d - 1 - s)) & 1;
          const std::size_t js = (j >> (d - 1 - s)) & 1;
          const CWord& e = (*kids[s])[is][js];
          p = s == 0 ? e : cmul(p, e);
        }
        if (i == j) p.im = zero_word();
        rho[i][j] = p;
      }
    }
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < i; ++j) rho[i][j] = conj(rho[j][i]);

    std::vector<std::vector<IntConst>> v(dim, std::vector<IntConst>(dim));
    for (std::size_t x = 0; x < dim; ++x)
      for (std::size_t y = 0; y < dim; ++y) v[x][y] = fixed_constant(node.unitary(x, y), mu_);

    b_.set_category("right_multiply");
    std::vector<std::vector<CWord>> t(dim, std::vector<CWord>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t y = 0; y < dim; ++y) {
        CWord acc;
        for (std::size_t j = 0; j < dim; ++j) {
          const CWord term = cmulc(rho[i][j], {v[y][j].re, -v[y][j].im});
          acc = j == 0 ? term : cadd(acc, term);
        }
        t[i][y] = acc;
      }
    }

    b_.set_category("left_multiply");
    const std::size_t rest = dim / 2;
    auto entry = [&](std::size_t x, std::size_t y) {
      CWord acc;
      for (std::size_t i = 0; i < dim; ++i) {
        const CWord term = cmulc(t[i][y], v[x][i]);
        acc = i == 0 ? term : cadd(acc, term);
      }
      return acc;
    };
    Density out(2, std::vector<CWord>(2));
    const std::pair<std::size_t, std::size_t> wanted[] = {{0, 0}, {0, 1}, {1, 1}};
    for (auto [a, bb] : wanted) {
      std::vector<CWord> terms;
      for (std::size_t r = 0; r < rest; ++r) {
        terms.push_back(entry(insert_bit(r, a, d, node.kept), insert_bit(r, bb, d, node.kept)));
      }
      b_.set_category("partial_trace");
      CWord acc = terms[0];
      for (std::size_t r = 1; r < rest; ++r) acc = cadd(acc, terms[r]);
      b_.set_category("left_multiply");
      out[a][bb] = acc;
    }
    out[0][0].im = zero_word();
    out[1][1].im = zero_word();
    b_.set_category("partial_trace");
    out[1][0] = conj(out[0][1]);
    return out;
  }

 private:
  Word finish_product(std::vector<std::vector<NodeId>> cols) {
    if (mu_ >= 1) cols[mu_ - 1].push_back(b_.one());
    const Word full = b_.sum_columns(std::move(cols), k_);
    return Word(full.begin() + mu_, full.begin() + mu_ + w_);
  }

  NetlistBuilder b_;
  int mu_;
  int w_;
  int k_;
};

struct SubtreeInfo {
  std::size_t gates = 0;
  std::size_t arity = 0;
};

}  // namespace

double range_requirement(const FormulaTree& tree, int mu) {
  const double ulp = std::ldexp(1.0, -mu);
  const double delta = truncation_delta(mu);
  std::vector<SubtreeInfo> info(tree.nodes.size());
  std::vector<double> budget(tree.nodes.size(), 0.0);
  double worst = 1.0;
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const TreeNode& node = tree.nodes[k];
    const std::size_t d = node.arity();
    const std::size_t dim = std::size_t{1} << d;
    double entry = 1.0;
    info[k] = {1, d};
    for (const auto& ch : node.children) {
      if (ch.is_leaf) continue;
      entry *= 1.0 + budget[ch.index];
      info[k].gates += info[ch.index].gates;
      info[k].arity = std::max(info[k].arity, info[ch.index].arity);
    }
    entry += static_cast<double>(d) * 2 * ulp;
    double row = 0;
    for (std::size_t x = 0; x < dim; ++x) {
      double sum = 0;
      for (std::size_t y = 0; y < dim; ++y) {
        const IntConst c = fixed_constant(node.unitary(x, y), mu);
        sum += (std::abs(static_cast<double>(c.re)) + std::abs(static_cast<double>(c.im))) * ulp;
      }
      row = std::max(row, sum);
    }
    const double t_bound = entry * row + static_cast<double>(dim) * 2 * ulp;
    const double p_bound = t_bound * row + static_cast<double>(dim) * 2 * ulp;
    const double out_bound = static_cast<double>(dim / 2) * p_bound;
    worst = std::max({worst, entry, t_bound, p_bound, out_bound});
    const double s = static_cast<double>(info[k].gates);
    budget[k] = circuit_error_bound(static_cast<int>(info[k].arity), delta, s) +
                s * std::ldexp(1.0, -mu + 6);
  }
  return worst;
}

Netlist compile_formula(const Circuit& f, int mu, const CompileOptions& options) {
  if (mu < 1 || mu > 40) throw PreconditionError("mu must lie in [1, 40]");
  const FormulaTree tree = extract_tree(f);
  if (tree.max_arity() > kDefaultMaxArity) {
    throw PreconditionError("gate arity " + std::to_string(tree.max_arity()) +
                            " exceeds the compiler limit " + std::to_string(kDefaultMaxArity));
  }
  const int width = mu + options.extra_width;
  const double need = range_requirement(tree, mu);
  const double limit = std::ldexp(1.0, width - 1 - mu);
  if (!(need < limit)) {
    const int extra = static_cast<int>(std::ceil(std::log2(need))) + 2;
    throw Error(ErrorKind::Range, "intermediates may reach " + std::to_string(need) +
                                      "; use a width of at least mu + " + std::to_string(extra));
  }

  Compiler comp(mu, width);
  std::vector<NodeId> inputs;
  for (int i = 0; i < f.num_vars(); ++i) inputs.push_back(comp.b().input());
  comp.b().set_category("leaves");

  std::vector<Compiler::Density> dens(tree.nodes.size());
  auto density_of = [&](const TreeChild& ch) -> Compiler::Density {
    return ch.is_leaf ? comp.leaf(ch, inputs) : dens[ch.index];
  };
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const TreeNode& node = tree.nodes[k];
    std::vector<Compiler::Density> kids;
    for (const auto& ch : node.children) kids.push_back(density_of(ch));
    std::vector<const Compiler::Density*> ptrs;
    for (const auto& kd : kids) ptrs.push_back(&kd);
    dens[k] = comp.gate(node, ptrs);
  }
  const Compiler::Density root = density_of(tree.root);
  return comp.b().finish(root[1][1].re, mu);
}

namespace {

std::int64_t decode(std::span<const std::uint64_t> bits, std::size_t lane) {
  std::uint64_t word = 0;
  const std::size_t w = bits.size();
  for (std::size_t i = 0; i < w; ++i) word |= ((bits[i] >> lane) & 1) << i;
  if (w < 64 && ((word >> (w - 1)) & 1)) word |= ~std::uint64_t{0} << w;
  return static_cast<std::int64_t>(word);
}

}  // namespace

NetlistValue eval_netlist(const Netlist& n, const Assignment& a) {
  if (a.size() != n.inputs.size()) {
    throw DimensionError("assignment has " + std::to_string(a.size()) + " bits, netlist reads " +
                         std::to_string(n.inputs.size()));
  }
  std::vector<std::uint64_t> in(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) in[i] = a.bits[i] ? 1 : 0;
  const auto out = eval_bitparallel(n, in);
  NetlistValue v;
  v.word = decode(out, 0);
  v.p = std::ldexp(static_cast<double>(v.word), -n.mu);
  return v;
}

std::vector<NetlistValue> eval_netlist_all(const Netlist& n) {
  const std::size_t vars = n.inputs.size();
  if (vars > static_cast<std::size_t>(kTruthTableMaxVars)) {
    throw BudgetError("too many netlist inputs to enumerate");
  }
  const std::uint64_t rows = std::uint64_t{1} << vars;
  std::vector<NetlistValue> values(rows);
  std::vector<std::uint64_t> in(vars);
  for (std::uint64_t base = 0; base < rows; base += 64) {
    const std::size_t lanes = static_cast<std::size_t>(std::min<std::uint64_t>(64, rows - base));
    std::fill(in.begin(), in.end(), 0);
    for (std::size_t lane = 0; lane < lanes; ++lane) {
      const std::uint64_t r = base + lane;
      for (std::size_t i = 0; i < vars; ++i) in[i] |= ((r >> (vars - 1 - i)) & 1) << lane;
    }
    const auto out = eval_bitparallel(n, in);
    for (std::size_t lane = 0; lane < lanes; ++lane) {
      NetlistValue& v = values[base + lane];
      v.word = decode(out, lane);
      v.p = std::ldexp(static_cast<double>(v.word), -n.mu);
    }
  }
  return values;
}

}  // namespace qf
