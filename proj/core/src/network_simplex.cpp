#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ineqcert/error.hpp"
#include "ineqcert/transport.hpp"

namespace ineqcert {
namespace {

// Spanning-tree basis of the transportation problem. Nodes 0..m-1 are
// sources, m..m+n-1 are sinks; node 0 is the root.
class TransportSimplex {
 public:
  TransportSimplex(std::span<const double> a, std::span<const double> b, const CostFunction& cost)
      : a_(a), b_(b), cost_(cost), m_(a.size()), n_(b.size()) {}

  TransportSolution run() {
    const std::size_t nodes = m_ + n_;
    adj_.assign(nodes, {});
    parent_.assign(nodes, kNone);
    parent_cell_.assign(nodes, kNone);
    depth_.assign(nodes, 0);
    pot_.assign(nodes, 0.0);

    double cmax = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) cmax = std::max(cmax, std::abs(cost_(i, j)));
    eps_ = 1e-12 * (1.0 + cmax);

    northwest_corner();
    relabel(0);

    const std::size_t total = m_ * n_;
    const std::size_t block = std::max<std::size_t>(16, static_cast<std::size_t>(std::sqrt(double(total))));
    const std::size_t limit = 200 * (m_ + n_) * (m_ + n_) + 1000;
    std::size_t next = 0;
    std::size_t pivots = 0;
    while (true) {
      std::size_t best = kNone;
      double best_rc = -eps_;
      std::size_t scanned = 0;
      std::size_t in_block = 0;
      while (scanned < total) {
        const std::size_t k = next;
        next = next + 1 == total ? 0 : next + 1;
        ++scanned;
        const std::size_t i = k / n_, j = k % n_;
        const double rc = cost_(i, j) - pot_[i] - pot_[m_ + j];
        if (rc < best_rc) {
          best_rc = rc;
          best = k;
        }
        if (++in_block == block) {
          if (best != kNone) break;
          in_block = 0;
        }
      }
      if (best == kNone) break;
      pivot(best / n_, best % n_);
      if (++pivots > limit) throw SolverError("network simplex exceeded its pivot limit");
    }

    TransportSolution sol;
    sol.pivots = pivots;
    for (const auto& c : cells_) {
      if (c.i == kNone) continue;
      sol.basis.push_back({c.i, c.j, c.flow});
      sol.primal += c.flow * cost_(c.i, c.j);
    }
    sol.u.assign(pot_.begin(), pot_.begin() + static_cast<std::ptrdiff_t>(m_));
    sol.v.assign(pot_.begin() + static_cast<std::ptrdiff_t>(m_), pot_.end());
    for (std::size_t i = 0; i < m_; ++i) sol.dual += a_[i] * sol.u[i];
    for (std::size_t j = 0; j < n_; ++j) sol.dual += b_[j] * sol.v[j];
    return sol;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  struct Cell {
    std::size_t i = kNone;
    std::size_t j = kNone;
    double flow = 0.0;
  };

  std::size_t add_cell(std::size_t i, std::size_t j, double flow) {
    std::size_t id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
      cells_[id] = {i, j, flow};
    } else {
      id = cells_.size();
      cells_.push_back({i, j, flow});
    }
    adj_[i].push_back(id);
    adj_[m_ + j].push_back(id);
    return id;
  }

  void remove_cell(std::size_t id) {
    for (std::size_t node : {cells_[id].i, m_ + cells_[id].j}) {
      auto& list = adj_[node];
      const auto it = std::find(list.begin(), list.end(), id);
      *it = list.back();
      list.pop_back();
    }
    cells_[id] = {};
    free_.push_back(id);
  }

  std::size_t other_end(std::size_t cell, std::size_t node) const {
    return node < m_ ? m_ + cells_[cell].j : cells_[cell].i;
  }

  void northwest_corner() {
    std::size_t i = 0, j = 0;
    double ra = a_[0], rb = b_[0];
    while (true) {
      const double f = std::max(0.0, std::min(ra, rb));
      add_cell(i, j, f);
      ra -= f;
      rb -= f;
      if (i + 1 == m_ && j + 1 == n_) break;
      if (j + 1 == n_ || (i + 1 < m_ && ra <= rb)) {
        ra = a_[++i];
      } else {
        rb = b_[++j];
      }
    }
  }

  // Recomputes depth and potentials for the subtree hanging below `root`,
  // whose parent link is already set.
  void relabel(std::size_t root) {
    std::vector<std::size_t> stack{root};
    if (parent_[root] == kNone) {
      depth_[root] = 0;
      pot_[root] = 0.0;
    } else {
      set_from_parent(root);
    }
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t cell : adj_[x]) {
        const std::size_t y = other_end(cell, x);
        if (y == parent_[x]) continue;
        parent_[y] = x;
        parent_cell_[y] = cell;
        set_from_parent(y);
        stack.push_back(y);
      }
    }
  }

  void set_from_parent(std::size_t y) {
    const std::size_t x = parent_[y];
    const Cell& c = cells_[parent_cell_[y]];
    depth_[y] = depth_[x] + 1;
    pot_[y] = cost_(c.i, c.j) - pot_[x];
  }

  void pivot(std::size_t ei, std::size_t ej) {
    const std::size_t r = ei, c = m_ + ej;
    // Climb both endpoints to the apex, recording tree nodes whose parent
    // edge lies on the cycle.
    std::vector<std::size_t> up_r, up_c;
    std::size_t x = r, y = c;
    while (x != y) {
      if (depth_[x] >= depth_[y]) {
        up_r.push_back(x);
        x = parent_[x];
      } else {
        up_c.push_back(y);
        y = parent_[y];
      }
    }
    // Orientation r -> c along the entering cell. On the c side the cycle
    // climbs (x -> parent), on the r side it descends (parent -> x). A cell
    // traversed source -> sink gains flow; sink -> source loses it.
    auto loses_c_side = [&](std::size_t node) { return node >= m_; };
    auto loses_r_side = [&](std::size_t node) { return node < m_; };

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave_node = kNone;
    bool leave_on_r = false;
    // Strongly feasible rule: last blocking cell when walking from the apex
    // down the r side, across the entering cell, then up the c side.
    for (auto it = up_r.rbegin(); it != up_r.rend(); ++it)
      if (loses_r_side(*it) && cells_[parent_cell_[*it]].flow <= theta) {
        theta = cells_[parent_cell_[*it]].flow;
        leave_node = *it;
        leave_on_r = true;
      }
    for (std::size_t node : up_c)
      if (loses_c_side(node) && cells_[parent_cell_[node]].flow <= theta) {
        theta = cells_[parent_cell_[node]].flow;
        leave_node = node;
        leave_on_r = false;
      }
    if (leave_node == kNone) throw SolverError("unbounded transportation cycle");

    for (std::size_t node : up_r) {
      double& f = cells_[parent_cell_[node]].flow;
      f = loses_r_side(node) ? std::max(0.0, f - theta) : f + theta;
    }
    for (std::size_t node : up_c) {
      double& f = cells_[parent_cell_[node]].flow;
      f = loses_c_side(node) ? std::max(0.0, f - theta) : f + theta;
    }

    const std::size_t leaving = parent_cell_[leave_node];
    const std::size_t entering = add_cell(ei, ej, theta);
    // Re-hang the detached subtree (rooted at leave_node) from the entering
    // cell: reverse parent links from the new attachment point up to it.
    const std::size_t attach = leave_on_r ? r : c;
    const std::size_t anchor = leave_on_r ? c : r;
    std::size_t node = attach, new_parent = anchor, new_cell = entering;
    while (true) {
      const std::size_t old_parent = parent_[node];
      const std::size_t old_cell = parent_cell_[node];
      parent_[node] = new_parent;
      parent_cell_[node] = new_cell;
      if (node == leave_node) break;
      new_parent = node;
      new_cell = old_cell;
      node = old_parent;
    }
    cells_[leaving].flow = 0.0;
    remove_cell(leaving);
    relabel(attach);
  }

  std::span<const double> a_, b_;
  const CostFunction& cost_;
  std::size_t m_, n_;
  double eps_ = 0.0;
  std::vector<Cell> cells_;
  std::vector<std::size_t> free_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> parent_, parent_cell_, depth_;
  std::vector<double> pot_;
};

}  // namespace

TransportSolution solve_transportation(std::span<const double> a, std::span<const double> b, const CostFunction& cost) {
  if (a.empty() || b.empty()) throw InputError("transportation problem with an empty marginal");
  double sa = 0.0, sb = 0.0;
  for (double w : a) {
    if (!(w >= 0.0)) throw InputError("negative or non-finite source weight");
    sa += w;
  }
  for (double w : b) {
    if (!(w >= 0.0)) throw InputError("negative or non-finite target weight");
    sb += w;
  }
  if (std::abs(sa - sb) > 1e-12 * std::max(1.0, sa)) throw InputError("marginals carry different total mass");
  return TransportSimplex(a, b, cost).run();
}

}  // namespace ineqcert
