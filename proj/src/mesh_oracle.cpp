#include "maxrank/mesh_oracle.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <queue>

#include "maxrank/errors.hpp"
#include "maxrank/geodesic.hpp"

namespace maxrank {

namespace {

struct Offset {
  int a, b;
};

std::vector<Offset> stencil_offsets(int k, int reach, int axis_reach) {
  std::vector<Offset> out;
  if (k == 1) return {{1, 0}, {-1, 0}};
  for (int a = -reach; a <= reach; ++a) {
    for (int b = -reach; b <= reach; ++b) {
      if ((a != 0 || b != 0) && std::gcd(a, b) == 1) out.push_back({a, b});
    }
  }
  // The widest angular gaps of a square stencil sit next to the axes.
  for (int m = reach + 1; m <= axis_reach; ++m) {
    for (int s : {-1, 1}) {
      for (int t : {-1, 1}) {
        out.push_back({s, t * m});
        out.push_back({t * m, s});
      }
    }
  }
  return out;
}

struct Attach {
  int vertex;
  double weight;
};

struct SearchResult {
  double length = std::numeric_limits<double>::infinity();
  std::size_t settled = 0;
  std::vector<std::array<double, 2>> grid_path;  // unwrapped grid coordinates, p ... q
};

}  // namespace

struct MeshGraph::Level {
  static constexpr int kCellsPerPanel = 6;
  const EmbeddedManifold* m;
  int k;
  int res;
  std::array<int, 2> n{1, 1};
  std::array<int, 2> dn{1, 1};
  std::array<double, 2> h{0.0, 0.0};
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> period{0.0, 0.0};
  std::array<bool, 2> periodic{false, false};
  std::vector<std::int32_t> slot;
  std::vector<std::array<double, 3>> grams;
  std::vector<std::uint8_t> active;  // empty: every vertex is active

  Level(const EmbeddedManifold& manifold, const Box& eff, int resolution)
      : m(&manifold), k(manifold.intrinsic_dim()), res(resolution) {
    for (int ax = 0; ax < k; ++ax) {
      const auto& c = manifold.coordinates()[ax];
      periodic[ax] = c.period.has_value();
      origin[ax] = eff.ranges[ax].lo;
      h[ax] = eff.ranges[ax].width() / res;
      n[ax] = periodic[ax] ? res : res + 1;
      dn[ax] = periodic[ax] ? 2 * res : 2 * res + 1;
      if (periodic[ax]) period[ax] = *c.period;
    }
    slot.assign(static_cast<std::size_t>(dn[0]) * dn[1], -1);
  }

  int vertices() const { return n[0] * n[1]; }
  bool is_active(int v) const { return active.empty() || active[v]; }

  static int wrap_index(int i, int size, bool per) {
    if (per) return ((i % size) + size) % size;
    return (i < 0 || i >= size) ? -1 : i;
  }
  int wrap(int ax, int i) const { return wrap_index(i, n[ax], periodic[ax]); }
  int dwrap(int ax, int i) const { return wrap_index(i, dn[ax], periodic[ax]); }

  const std::array<double, 3>& gram(int di, int dj) {
    const std::size_t idx = static_cast<std::size_t>(di) + static_cast<std::size_t>(dn[0]) * dj;
    if (slot[idx] < 0) {
      Vec u(k);
      u[0] = origin[0] + 0.5 * h[0] * di;
      if (k == 2) u[1] = origin[1] + 0.5 * h[1] * dj;
      const Mat jac = m->jacobian_at(u);
      const Mat g = jac.transpose() * jac;
      slot[idx] = static_cast<std::int32_t>(grams.size());
      grams.push_back({g(0, 0), k == 2 ? g(0, 1) : 0.0, k == 2 ? g(1, 1) : 0.0});
    }
    return grams[slot[idx]];
  }

  static double speed(const std::array<double, 3>& g, double dx, double dy) {
    return std::sqrt(std::max(0.0, g[0] * dx * dx + 2.0 * g[1] * dx * dy + g[2] * dy * dy));
  }

  double edge_weight(int i, int j, const Offset& o) {
    const double dx = o.a * h[0];
    const double dy = o.b * h[1];
    const int span = std::max(std::abs(o.a), std::abs(o.b));
    if (span > kCellsPerPanel) {
      // long edges get one panel per few cells; a single panel biases the search toward them
      Vec u(k), d(k);
      u[0] = origin[0] + i * h[0];
      d[0] = dx;
      if (k == 2) {
        u[1] = origin[1] + j * h[1];
        d[1] = dy;
      }
      return segment_length(*m, u, d, (span + kCellsPerPanel - 1) / kCellsPerPanel);
    }
    const double s0 = speed(gram(2 * i, 2 * j), dx, dy);
    const double sm = speed(gram(dwrap(0, 2 * i + o.a), dwrap(1, 2 * j + o.b)), dx, dy);
    const double s1 = speed(gram(dwrap(0, 2 * i + 2 * o.a), dwrap(1, 2 * j + 2 * o.b)), dx, dy);
    return (s0 + 4.0 * sm + s1) / 6.0;
  }

  std::array<double, 2> grid_coords(const Vec& u) const {
    std::array<double, 2> g{0.0, 0.0};
    for (int ax = 0; ax < k; ++ax) g[ax] = (u[ax] - origin[ax]) / h[ax];
    return g;
  }

  Vec chart_of(const std::array<double, 2>& g) const {
    Vec u(k);
    for (int ax = 0; ax < k; ++ax) u[ax] = origin[ax] + g[ax] * h[ax];
    return u;
  }

  /// Active vertices within Chebyshev index radius `reach` of the chart point u, with segment weights.
  std::vector<Attach> attachments(const Vec& u, int reach) const {
    const auto g = grid_coords(u);
    const int i0 = static_cast<int>(std::floor(g[0]));
    const int j0 = k == 2 ? static_cast<int>(std::floor(g[1])) : 0;
    const int jr = k == 2 ? reach : 0;
    std::vector<Attach> out;
    for (int dj = -jr; dj <= jr + (k == 2 ? 1 : 0); ++dj) {
      for (int di = -reach; di <= reach + 1; ++di) {
        const int i = wrap(0, i0 + di);
        const int j = k == 2 ? wrap(1, j0 + dj) : 0;
        if (i < 0 || j < 0) continue;
        const int v = i + n[0] * j;
        if (!is_active(v)) continue;
        Vec delta(k);
        delta[0] = (i0 + di - g[0]) * h[0];
        if (k == 2) delta[1] = (j0 + dj - g[1]) * h[1];
        out.push_back({v, segment_length(*m, u, delta, 4)});
      }
    }
    return out;
  }

  SearchResult search(const Vec& up, const Vec& uq, const std::vector<Offset>& offsets, int reach) {
    SearchResult res_out;
    const int nv = vertices();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(nv, inf);
    std::vector<std::int32_t> pred(nv, -2);
    std::vector<double> to_target(nv, -1.0);
    for (const auto& a : attachments(uq, reach)) to_target[a.vertex] = a.weight;

    double best = inf;
    int best_vertex = -1;
    const Vec direct = m->wrap_difference(up, uq);
    bool near = true;
    for (int ax = 0; ax < k; ++ax) near = near && std::abs(direct[ax]) <= (reach + 1) * h[ax];
    if (near) best = segment_length(*m, up, direct, 8);

    using Item = std::pair<double, std::int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (const auto& a : attachments(up, reach)) {
      if (a.weight < dist[a.vertex]) {
        dist[a.vertex] = a.weight;
        pred[a.vertex] = -1;
        heap.push({a.weight, a.vertex});
      }
    }
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[v]) continue;
      if (d >= best) break;
      ++res_out.settled;
      if (to_target[v] >= 0.0 && d + to_target[v] < best) {
        best = d + to_target[v];
        best_vertex = v;
      }
      const int i = v % n[0];
      const int j = v / n[0];
      for (const auto& o : offsets) {
        const int ni = wrap(0, i + o.a);
        const int nj = wrap(1, j + o.b);
        if (ni < 0 || nj < 0) continue;
        const int w = ni + n[0] * nj;
        if (!is_active(w)) continue;
        const double nd = d + edge_weight(i, j, o);
        if (nd < dist[w] && nd < best) {
          dist[w] = nd;
          pred[w] = v;
          heap.push({nd, w});
        }
      }
    }
    if (!std::isfinite(best)) return res_out;
    res_out.length = best;

    // Unwrapped grid path p -> vertices -> q.
    std::vector<int> chain;
    for (int v = best_vertex; v >= 0; v = pred[v]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());
    auto& path = res_out.grid_path;
    path.push_back(grid_coords(up));
    auto unwrap_next = [&](std::array<double, 2> g) {
      for (int ax = 0; ax < k; ++ax) {
        if (periodic[ax]) g[ax] += n[ax] * std::round((path.back()[ax] - g[ax]) / n[ax]);
      }
      path.push_back(g);
    };
    for (int v : chain) unwrap_next({static_cast<double>(v % n[0]), static_cast<double>(v / n[0])});
    unwrap_next(grid_coords(uq));

    // The search ranks paths by one Simpson panel per edge, which underestimates long
    // stencil edges; report the chosen path's length with enough panels per cell.
    double len = 0.0;
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
      const Vec a = chart_of(path[s]);
      const Vec b = chart_of(path[s + 1]);
      double cells = 0.0;
      for (int ax = 0; ax < k; ++ax) cells = std::max(cells, std::abs(path[s + 1][ax] - path[s][ax]));
      len += segment_length(*m, a, b - a, 4 + 2 * static_cast<int>(std::ceil(cells)));
    }
    res_out.length = len;
    return res_out;
  }

  /// Activates vertices of this level within `band` cells of a path given in
  /// the grid coordinates of a level with half the resolution.
  void activate_corridor(const std::vector<std::array<double, 2>>& coarse_path, int band) {
    active.assign(vertices(), 0);
    auto mark = [&](double ci, double cj) {
      const int i0 = static_cast<int>(std::lround(ci));
      const int j0 = static_cast<int>(std::lround(cj));
      const int jr = k == 2 ? band : 0;
      for (int dj = -jr; dj <= jr; ++dj) {
        const int j = k == 2 ? wrap(1, j0 + dj) : 0;
        if (j < 0) continue;
        for (int di = -band; di <= band; ++di) {
          const int i = wrap(0, i0 + di);
          if (i >= 0) active[i + n[0] * j] = 1;
        }
      }
    };
    for (std::size_t s = 0; s + 1 < coarse_path.size(); ++s) {
      const double ax = 2.0 * coarse_path[s][0], ay = 2.0 * coarse_path[s][1];
      const double bx = 2.0 * coarse_path[s + 1][0], by = 2.0 * coarse_path[s + 1][1];
      const int steps = 1 + static_cast<int>(std::ceil(std::max(std::abs(bx - ax), std::abs(by - ay))));
      for (int t = 0; t <= steps; ++t) {
        const double f = static_cast<double>(t) / steps;
        mark(ax + f * (bx - ax), ay + f * (by - ay));
      }
    }
  }
};

MeshGraph::MeshGraph(ManifoldPtr m, const Box& box, int resolution, MeshOptions opts)
    : m_(std::move(m)), box_(m_->effective_box(box)), resolution_(resolution), opts_(opts) {
  const int k = m_->intrinsic_dim();
  if (k > 2) throw InvalidArgument("mesh oracle supports one- and two-dimensional charts only");
  if (resolution < 16) throw InvalidArgument("mesh resolution must be at least 16");
  if (opts_.stencil < 1 || opts_.refinements < 0 || opts_.corridor < 1) throw InvalidArgument("bad mesh options");
  for (int ax = 0; ax < k; ++ax) {
    if (!box_.ranges[ax].bounded() || !(box_.ranges[ax].width() > 0.0))
      throw InvalidArgument("mesh oracle needs a bounded box in coordinate " + m_->coordinates()[ax].name);
  }
  base_ = std::make_unique<Level>(*m_, box_, resolution_);
}

MeshGraph::~MeshGraph() = default;

MeshPath MeshGraph::shortest_path(const ManifoldPoint& p, const ManifoldPoint& q) {
  const int k = m_->intrinsic_dim();
  for (const auto* x : {&p, &q}) {
    for (int ax = 0; ax < k; ++ax) {
      if (!m_->coordinates()[ax].period && !box_.ranges[ax].contains(x->chart[ax], 1e-12))
        throw DomainViolation("mesh endpoint outside the truncation box");
    }
  }
  const auto offsets = stencil_offsets(k, opts_.stencil, opts_.axis_stencil);
  const int reach = opts_.stencil + 1;

  SearchResult best = base_->search(p.chart, q.chart, offsets, reach);
  if (!std::isfinite(best.length)) throw Unreachable("no mesh path joins the endpoints");
  int best_res = resolution_;
  Level* cur = base_.get();
  std::unique_ptr<Level> owned;
  for (int r = 0; r < opts_.refinements; ++r) {
    auto fine = std::make_unique<Level>(*m_, box_, cur->res * 2);
    fine->activate_corridor(best.grid_path, 2 * opts_.corridor);
    SearchResult s = fine->search(p.chart, q.chart, offsets, reach);
    if (s.length < best.length) {
      best = std::move(s);
      best_res = fine->res;
    } else {
      for (auto& g : best.grid_path) g = {2.0 * g[0], 2.0 * g[1]};  // keep following the coarse path
      best_res = fine->res;
    }
    owned = std::move(fine);
    cur = owned.get();
  }

  MeshPath out;
  out.length = best.length;
  out.resolution = best_res;
  out.settled = best.settled;
  for (const auto& g : best.grid_path) out.chart_points.push_back(cur->chart_of(g));
  return out;
}

double mesh_distance_oracle(ManifoldPtr m, const ManifoldPoint& p, const ManifoldPoint& q, int resolution,
                            const Box& box, MeshOptions opts) {
  MeshGraph g(std::move(m), box, resolution, opts);
  return g.distance(p, q);
}

}  // namespace maxrank
