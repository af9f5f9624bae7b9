#include "semiform/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>

namespace semiform {

IsometryWitness IsometryWitness::identity(const Semiring& s, std::size_t n) {
  IsometryWitness w;
  w.perm.resize(n);
  std::iota(w.perm.begin(), w.perm.end(), std::size_t{0});
  w.units.assign(n, s.one());
  return w;
}

IsometryWitness compose(const Semiring& s, const IsometryWitness& first,
                        const IsometryWitness& second) {
  const std::size_t n = first.perm.size();
  if (second.perm.size() != n) throw DimensionMismatch("composing witnesses of different ranks");
  IsometryWitness out;
  for (std::size_t i = 0; i < n; ++i) {
    out.perm.push_back(second.perm[first.perm[i]]);
    out.units.push_back(s.mul(first.units[i], second.units[first.perm[i]]));
  }
  return out;
}

IsometryWitness inverse(const Semiring& s, const IsometryWitness& w) {
  const std::size_t n = w.perm.size();
  IsometryWitness out{std::vector<std::size_t>(n), Coeffs(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = s.try_invert(w.units[i]);
    if (!u) throw PreconditionError("witness scalar is not a unit");
    out.perm[w.perm[i]] = i;
    out.units[w.perm[i]] = *u;
  }
  return out;
}

Matrix apply_witness(const Semiring& s, const IsometryWitness& w, const Matrix& source) {
  const std::size_t n = source.size();
  if (w.perm.size() != n || w.units.size() != n) {
    throw DimensionMismatch("witness rank differs from form rank");
  }
  Matrix out = zero_matrix(s, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[w.perm[i]][w.perm[j]] = s.mul(s.mul(w.units[i], w.units[j]), source[i][j]);
    }
  }
  return out;
}

Form apply_witness(const IsometryWitness& w, const Form& source) {
  const auto& s = form_semiring(source);
  return form_from_coefficients(source, apply_witness(s, w, coefficient_matrix(source)));
}

std::string cycle_notation(const std::vector<std::size_t>& perm) {
  std::vector<bool> seen(perm.size(), false);
  std::ostringstream out;
  bool any = false;
  for (std::size_t start = 0; start < perm.size(); ++start) {
    if (seen[start] || perm[start] == start) continue;
    any = true;
    out << '(';
    std::size_t i = start;
    bool first = true;
    while (!seen[i]) {
      seen[i] = true;
      out << (first ? "" : " ") << i + 1;
      first = false;
      i = perm[i];
    }
    out << ')';
  }
  return any ? out.str() : "()";
}

std::vector<std::size_t> parse_cycles(const std::string& text, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<bool> moved(n, false);
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) {
    throw ParseError("bad cycle notation '" + text + "': " + why);
  };
  while (pos < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
      continue;
    }
    if (text[pos] != '(') fail("expected '('");
    const auto close = text.find(')', pos);
    if (close == std::string::npos) fail("unclosed cycle");
    std::string body = text.substr(pos + 1, close - pos - 1);
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream in(body);
    std::vector<std::size_t> cycle;
    std::string token;
    while (in >> token) {
      std::size_t value = 0;
      try {
        value = std::stoul(token);
      } catch (const std::exception&) {
        fail("non-numeric entry '" + token + "'");
      }
      if (value < 1 || value > n) fail("entry " + token + " out of range");
      if (moved[value - 1]) fail("entry " + token + " repeated");
      moved[value - 1] = true;
      cycle.push_back(value - 1);
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) perm[cycle[k]] = cycle[(k + 1) % cycle.size()];
    pos = close + 1;
  }
  return perm;
}

UnitCandidates UnitCandidates::of(std::vector<Scalar> units) {
  UnitCandidates c;
  std::sort(units.begin(), units.end());
  units.erase(std::unique(units.begin(), units.end()), units.end());
  c.units_ = std::move(units);
  return c;
}

UnitCandidates UnitCandidates::solver() {
  UnitCandidates c;
  c.solver_ = true;
  return c;
}

UnitCandidates UnitCandidates::defaults(const Semiring& s) {
  if (auto units = s.units()) return of(std::move(*units));
  if (s.has_log_units()) return solver();
  throw PreconditionError("no unit candidates for " + s.name() +
                          "; supply a finite candidate set");
}

namespace {

Scalar pair_value(const Semiring& s, const Scalar& a, const Scalar& b, const Scalar& cross,
                  const Scalar& x, const Scalar& y) {
  return s.add(s.add(s.mul(a, s.mul(x, x)), s.mul(b, s.mul(y, y))), s.mul(cross, s.mul(x, y)));
}

// Cross terms c1, c2 over the plane of two base vectors with diagonal
// coefficients a, b. `carrier` is empty unless the semiring is finite.
bool same_cross_term(const Semiring& s, const std::vector<Scalar>& carrier, const Scalar& a,
                     const Scalar& b, const Scalar& c1, const Scalar& c2) {
  if (c1 == c2) return true;
  if (s.pair_quasilinear(a, b, c1) && s.pair_quasilinear(a, b, c2)) return true;
  if (carrier.empty()) return false;
  for (const auto& x : carrier) {
    for (const auto& y : carrier) {
      if (pair_value(s, a, b, c1, x, y) != pair_value(s, a, b, c2, x, y)) return false;
    }
  }
  return true;
}

bool same_quadratic_function(const Semiring& s, const std::vector<Scalar>& carrier,
                             const Matrix& m1, const Matrix& m2) {
  const std::size_t n = m1.size();
  Coeffs x(n, carrier.front());
  std::vector<std::size_t> digit(n, 0);
  auto value = [&](const Matrix& m) {
    Scalar total = s.zero();
    for (std::size_t i = 0; i < n; ++i) {
      total = s.add(total, s.mul(m[i][i], s.mul(x[i], x[i])));
      for (std::size_t j = i + 1; j < n; ++j) total = s.add(total, s.mul(m[i][j], s.mul(x[i], x[j])));
    }
    return total;
  };
  while (true) {
    if (value(m1) != value(m2)) return false;
    std::size_t k = 0;
    while (k < n && ++digit[k] == carrier.size()) {
      digit[k] = 0;
      x[k] = carrier[0];
      ++k;
    }
    if (k == n) return true;
    x[k] = carrier[digit[k]];
  }
}

class Search {
 public:
  Search(const Semiring& s, Matrix src, Matrix dst, bool quadratic, const UnitCandidates& units)
      : s_(s),
        src_(std::move(src)),
        dst_(std::move(dst)),
        n_(src_.size()),
        quadratic_(quadratic),
        units_(units) {
    if (units_.uses_solver() && !s_.has_log_units()) {
      throw PreconditionError("the unit solver needs a semiring with logarithmic units");
    }
    if (!units_.uses_solver()) {
      if (units_.finite().empty()) throw PreconditionError("empty unit candidate set");
      for (const auto& u : units_.finite()) {
        if (!s_.is_unit(u)) throw PreconditionError(s_.format(u) + " is not a unit");
      }
    }
    perm_.assign(n_, 0);
    used_.assign(n_, false);
    if (quadratic_) {
      if (auto carrier = s_.carrier(); carrier && carrier->size() <= 16) carrier_ = std::move(*carrier);
    }
    src_degree_ = degrees(src_);
    dst_degree_ = degrees(dst_);
  }

  // Calls on_leaf(witness) for each feasible perm in lexicographic order;
  // stops when it returns true. `all_units` enumerates every unit tuple
  // per perm instead of only the least one.
  void run(bool all_units, const std::function<bool(const IsometryWitness&)>& on_leaf) {
    all_units_ = all_units;
    on_leaf_ = on_leaf;
    stop_ = false;
    dfs(0);
  }

 private:
  // A quadratic cross term absorbed by its two diagonal terms does not
  // change the form as a function, so it counts as zero. Absorption is
  // invariant under unit rescaling.
  bool inert(const Matrix& m, std::size_t i, std::size_t j) const {
    if (s_.is_zero(m[i][j])) return true;
    return quadratic_ && i != j && s_.pair_quasilinear(m[i][i], m[j][j], m[i][j]);
  }

  std::vector<std::size_t> degrees(const Matrix& m) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t d = 0;
      for (std::size_t j = 0; j < n_; ++j) d += inert(m, i, j) ? 0 : 1;
      out.push_back(d);
    }
    return out;
  }

  bool pattern_ok(std::size_t k) const {
    for (std::size_t j = 0; j <= k; ++j) {
      if (inert(src_, k, j) != inert(dst_, perm_[k], perm_[j])) return false;
    }
    return true;
  }

  bool unit_fits(std::size_t k, const Coeffs& units) const {
    for (std::size_t j = 0; j <= k; ++j) {
      if (inert(src_, k, j)) continue;
      const auto scaled = s_.mul(s_.mul(units[k], units[j]), src_[k][j]);
      const auto& target = dst_[perm_[k]][perm_[j]];
      if (scaled == target) continue;
      if (j == k || carrier_.empty()) return false;
      if (!same_cross_term(s_, carrier_, dst_[perm_[k]][perm_[k]], dst_[perm_[j]][perm_[j]], scaled,
                           target)) {
        return false;
      }
    }
    return true;
  }

  // Small finite carriers: pairwise agreement need not add up when the
  // addition saturates, so compare the whole functions.
  bool leaf_ok(const Coeffs& units) const {
    if (carrier_.empty()) return true;
    const double size = std::pow(static_cast<double>(carrier_.size()), static_cast<double>(n_));
    if (size > 4096) return true;
    return same_quadratic_function(s_, carrier_, apply_witness(s_, {perm_, units}, src_), dst_);
  }

  // Backtracking over finite candidates for positions 0..count-1.
  bool finite_units(std::size_t k, std::size_t count, Coeffs& units,
                    const std::function<bool(const Coeffs&)>& found) const {
    if (k == count) return found(units);
    for (const auto& u : units_.finite()) {
      units[k] = u;
      if (unit_fits(k, units) && finite_units(k + 1, count, units, found)) return true;
    }
    return false;
  }

  // Logs of the units satisfy u_i + u_j = log(dst/src) on every nonzero
  // source entry among positions 0..count-1. Per connected piece the
  // solution is u = sign * t + offset; an odd cycle or a diagonal entry fixes t,
  // otherwise t = 0 so that the piece's first index gets the unit 1.
  std::optional<Coeffs> solve_units(std::size_t count) const {
    struct Node {
      bool seen = false;
      int sign = 1;
      Rational offset{0};
    };
    std::vector<Node> node(count);
    std::vector<Rational> logs(count);
    for (std::size_t root = 0; root < count; ++root) {
      if (node[root].seen) continue;
      std::optional<Rational> t;
      std::vector<std::size_t> piece;
      std::deque<std::size_t> queue{root};
      node[root] = {true, 1, Rational(0)};
      while (!queue.empty()) {
        const auto i = queue.front();
        queue.pop_front();
        piece.push_back(i);
        for (std::size_t j = 0; j < count; ++j) {
          if (inert(src_, i, j)) continue;
          const auto r = s_.unit_log_ratio(src_[i][j], dst_[perm_[i]][perm_[j]]);
          if (!r) return std::nullopt;
          if (!node[j].seen) {
            node[j] = {true, -node[i].sign, *r - node[i].offset};
            queue.push_back(j);
            continue;
          }
          const int coeff = node[i].sign + node[j].sign;
          const Rational rest = *r - node[i].offset - node[j].offset;
          if (coeff == 0) {
            if (rest != Rational(0)) return std::nullopt;
          } else {
            const Rational value = rest / Rational(coeff);
            if (t && *t != value) return std::nullopt;
            t = value;
          }
        }
      }
      for (auto i : piece) logs[i] = node[i].offset + Rational(node[i].sign) * t.value_or(Rational(0));
    }
    Coeffs units;
    for (const auto& v : logs) units.push_back(s_.unit_exp(v));
    for (std::size_t k = 0; k < count; ++k) {
      if (!unit_fits(k, units)) return std::nullopt;
    }
    return units;
  }

  bool prefix_feasible(std::size_t count) const {
    if (units_.uses_solver()) return solve_units(count).has_value();
    Coeffs units(count);
    return finite_units(0, count, units, [](const Coeffs&) { return true; });
  }

  void leaf() {
    if (units_.uses_solver()) {
      if (auto units = solve_units(n_); units && leaf_ok(*units)) stop_ = on_leaf_({perm_, *units});
      return;
    }
    Coeffs units(n_);
    finite_units(0, n_, units, [&](const Coeffs& u) {
      if (!leaf_ok(u)) return false;
      stop_ = on_leaf_({perm_, u});
      return stop_ || !all_units_;
    });
  }

  void dfs(std::size_t k) {
    if (stop_) return;
    if (k == n_) {
      leaf();
      return;
    }
    for (std::size_t target = 0; target < n_ && !stop_; ++target) {
      if (used_[target] || src_degree_[k] != dst_degree_[target]) continue;
      perm_[k] = target;
      if (!pattern_ok(k)) continue;
      if (!prefix_feasible(k + 1)) continue;
      used_[target] = true;
      dfs(k + 1);
      used_[target] = false;
    }
  }

  const Semiring& s_;
  Matrix src_;
  Matrix dst_;
  std::size_t n_;
  bool quadratic_;
  std::vector<Scalar> carrier_;
  const UnitCandidates& units_;
  std::vector<std::size_t> perm_;
  std::vector<bool> used_;
  std::vector<std::size_t> src_degree_;
  std::vector<std::size_t> dst_degree_;
  bool all_units_ = false;
  bool stop_ = false;
  std::function<bool(const IsometryWitness&)> on_leaf_;
};

void require_comparable(const Form& f1, const Form& f2) {
  if (is_quadratic(f1) != is_quadratic(f2)) {
    throw PreconditionError("isometry between a bilinear and a quadratic form");
  }
  if (!(form_semiring(f1) == form_semiring(f2))) {
    throw SemiringMismatch("forms over " + form_semiring(f1).name() + " and " +
                           form_semiring(f2).name());
  }
}

}  // namespace

bool same_form(const Form& f1, const Form& f2) {
  require_comparable(f1, f2);
  if (form_rank(f1) != form_rank(f2)) return false;
  const auto m1 = coefficient_matrix(f1);
  const auto m2 = coefficient_matrix(f2);
  if (!is_quadratic(f1)) return m1 == m2;
  const auto& s = form_semiring(f1);
  std::vector<Scalar> carrier;
  if (auto c = s.carrier(); c && c->size() <= 16) carrier = std::move(*c);
  const std::size_t n = m1.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (m1[i][i] != m2[i][i]) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!same_cross_term(s, carrier, m1[i][i], m1[j][j], m1[i][j], m2[i][j])) return false;
    }
  }
  if (carrier.empty() || std::pow(static_cast<double>(carrier.size()), static_cast<double>(n)) > 4096) {
    return true;
  }
  return same_quadratic_function(s, carrier, m1, m2);
}

std::optional<IsometryWitness> isometry_search(const Form& f1, const Form& f2,
                                               const UnitCandidates& units) {
  require_comparable(f1, f2);
  if (form_rank(f1) != form_rank(f2)) return std::nullopt;
  const auto& s = form_semiring(f1);
  const auto source = coefficient_matrix(f1);
  const auto target = coefficient_matrix(f2);
  Search search(s, source, target, is_quadratic(f1), units);
  std::optional<IsometryWitness> found;
  search.run(false, [&](const IsometryWitness& w) {
    found = w;
    return true;
  });
  if (found && !same_form(apply_witness(*found, f1), f2)) {
    throw Error("isometry search produced an unsound witness");
  }
  return found;
}

std::optional<IsometryWitness> isometry_search(const Form& f1, const Form& f2) {
  return isometry_search(f1, f2, UnitCandidates::defaults(form_semiring(f1)));
}

bool maps_blocks(const IsometryWitness& w, const BasePartition& p1, const BasePartition& p2) {
  if (p1.size() != p2.size()) return false;
  std::vector<IndexSet> images;
  for (const auto& block : p1) {
    IndexSet image;
    for (auto i : block) {
      if (i >= w.perm.size()) return false;
      image.push_back(w.perm[i]);
    }
    std::sort(image.begin(), image.end());
    images.push_back(std::move(image));
  }
  std::vector<IndexSet> targets = p2;
  std::sort(images.begin(), images.end());
  std::sort(targets.begin(), targets.end());
  return images == targets;
}

MultiplicityMap multiplicities(const Form& f, const UnitCandidates& units) {
  MultiplicityMap out;
  for (const auto& block : decompose(f)) {
    const auto piece = restrict_form(f, block);
    bool placed = false;
    for (auto& cls : out) {
      if (form_rank(cls.representative) != block.size()) continue;
      if (isometry_search(cls.representative, piece, units)) {
        cls.blocks.push_back(block);
        placed = true;
        break;
      }
    }
    if (!placed) out.push_back({piece, {block}});
  }
  return out;
}

namespace {

// Index of the class of `m` isometric to `rep`, if any.
std::optional<std::size_t> find_class(const MultiplicityMap& m, const Form& rep,
                                      const UnitCandidates& units) {
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (form_rank(m[k].representative) != form_rank(rep)) continue;
    if (isometry_search(rep, m[k].representative, units)) return k;
  }
  return std::nullopt;
}

}  // namespace

bool isometric_by_multiplicity(const Form& f1, const Form& f2, const UnitCandidates& units) {
  require_comparable(f1, f2);
  if (form_rank(f1) != form_rank(f2)) return false;
  const auto m1 = multiplicities(f1, units);
  const auto m2 = multiplicities(f2, units);
  if (m1.size() != m2.size()) return false;
  std::vector<bool> matched(m2.size(), false);
  for (const auto& cls : m1) {
    const auto k = find_class(m2, cls.representative, units);
    if (!k || matched[*k] || m2[*k].count() != cls.count()) return false;
    matched[*k] = true;
  }
  return true;
}

namespace {

IndexSet complement_of(std::size_t n, const IndexSet& w) {
  IndexSet out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::binary_search(w.begin(), w.end(), i)) out.push_back(i);
  }
  return out;
}

std::size_t count_in(const MultiplicityMap& m, const Form& rep, const UnitCandidates& units) {
  const auto k = find_class(m, rep, units);
  return k ? m[*k].count() : 0;
}

}  // namespace

WittVerdict witt_cancel(const Form& v, const Form& v2, const IndexSet& w1_in,
                        const IndexSet& w1_2_in, const UnitCandidates& units) {
  require_comparable(v, v2);
  const auto w1 = make_basic(form_rank(v), w1_in).indices;
  const auto w1_2 = make_basic(form_rank(v2), w1_2_in).indices;
  if (!is_block_union(decompose(v), w1)) {
    throw PreconditionError("W1 is not a union of indecomposable components of V");
  }
  if (!is_block_union(decompose(v2), w1_2)) {
    throw PreconditionError("W1' is not a union of indecomposable components of V'");
  }
  if (!isometric_by_multiplicity(v, v2, units)) throw PreconditionError("V is not isometric to V'");
  const auto f_w1 = restrict_form(v, w1);
  const auto f_w1_2 = restrict_form(v2, w1_2);
  if (!isometric_by_multiplicity(f_w1, f_w1_2, units)) {
    throw PreconditionError("W1 is not isometric to W1'");
  }

  WittVerdict out;
  out.w2 = complement_of(form_rank(v), w1);
  out.w2_2 = complement_of(form_rank(v2), w1_2);
  const auto f_w2 = restrict_form(v, out.w2);
  const auto f_w2_2 = restrict_form(v2, out.w2_2);
  out.complements_isometric = isometric_by_multiplicity(f_w2, f_w2_2, units);

  const MultiplicityMap maps[] = {multiplicities(v, units),   multiplicities(f_w1, units),
                                  multiplicities(f_w2, units), multiplicities(v2, units),
                                  multiplicities(f_w1_2, units), multiplicities(f_w2_2, units)};
  for (const auto& cls : maps[0]) {
    LedgerRow row{cls.representative};
    row.in_v = cls.count();
    row.in_w1 = count_in(maps[1], cls.representative, units);
    row.in_w2 = count_in(maps[2], cls.representative, units);
    row.in_v2 = count_in(maps[3], cls.representative, units);
    row.in_w1_2 = count_in(maps[4], cls.representative, units);
    row.in_w2_2 = count_in(maps[5], cls.representative, units);
    out.ledger.push_back(std::move(row));
  }
  return out;
}

OrthogonalGroup orthogonal_group(const Form& f, const UnitCandidates& units) {
  const std::size_t n = form_rank(f);
  if (n > 8) throw PreconditionError("orthogonal group enumeration is limited to rank 8");
  if (units.uses_solver()) {
    throw PreconditionError("orthogonal group enumeration needs a finite unit candidate set");
  }
  const auto& s = form_semiring(f);
  const auto m = coefficient_matrix(f);
  OrthogonalGroup out;
  Search search(s, m, m, is_quadratic(f), units);
  search.run(true, [&](const IsometryWitness& w) {
    out.elements.push_back(w);
    return false;
  });

  // Isotypical components: the union of the blocks in each class.
  for (const auto& cls : multiplicities(f, units)) {
    IndexSet component;
    for (const auto& block : cls.blocks) component.insert(component.end(), block.begin(), block.end());
    std::sort(component.begin(), component.end());
    for (const auto& w : out.elements) {
      IndexSet image;
      for (auto i : component) image.push_back(w.perm[i]);
      std::sort(image.begin(), image.end());
      if (image != component) out.preserves_isotypical = false;
    }
  }
  return out;
}

}  // namespace semiform
