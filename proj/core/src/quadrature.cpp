#include "hardylab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hardylab/numerics.hpp"

namespace hardylab {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1,1], positive half; the
// embedded 7-point Gauss rule lives at the odd Kronrod indices. Values are
// the classical double-precision tables; the unit tests pin them down via
// polynomial exactness up to degree 22 (Kronrod) and 13 (Gauss).
constexpr int kHalf = 8;
constexpr double kNode[kHalf] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWeight[kHalf] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGaussWeight[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr int kPoints = 15;

void fill_nodes(double a, double b, double* nodes) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < kHalf - 1; ++i) {
    nodes[i] = c - h * kNode[i];
    nodes[kPoints - 1 - i] = c + h * kNode[i];
  }
  nodes[kHalf - 1] = c;
}

// Full-rule weight for node index i in the symmetric 15-point layout.
double wk(int i) { return kWeight[i < kHalf ? i : kPoints - 1 - i]; }

// Gauss weight for node index i, zero off the embedded rule.
double wg(int i) {
  int m = i < kHalf ? i : kPoints - 1 - i;
  return (m % 2 == 1 || m == kHalf - 1) ? kGaussWeight[m / 2] : 0.0;
}

struct Cell1 {
  double a, b;
  double val, err;
  long idx;
};

struct Cell2 {
  double ax, bx, ay, by;
  double val, err, err_x, err_y;
  long idx;
};

template <class Cell>
struct WorstFirst {
  bool operator()(const Cell& lhs, const Cell& rhs) const {
    if (lhs.err != rhs.err) return lhs.err < rhs.err;
    return lhs.idx > rhs.idx;  // older cells split first on ties
  }
};

Cell1 eval_cell(const std::function<double(double)>& f, double a, double b, long idx) {
  double nodes[kPoints], fv[kPoints];
  fill_nodes(a, b, nodes);
  double h = 0.5 * (b - a);
  NeumaierSum kr, gs;
  for (int i = 0; i < kPoints; ++i) {
    fv[i] = f(nodes[i]);
    kr.add(wk(i) * fv[i]);
    gs.add(wg(i) * fv[i]);
  }
  double k = kr.value() * h, g = gs.value() * h;
  return {a, b, k, std::abs(k - g), idx};
}

Cell2 eval_cell(const std::function<double(double, double)>& f, double ax, double bx, double ay,
                double by, long idx) {
  double nx[kPoints], ny[kPoints];
  fill_nodes(ax, bx, nx);
  fill_nodes(ay, by, ny);
  double scale = 0.25 * (bx - ax) * (by - ay);

  // Row-reduce along y first, keeping both rules per row, then combine along
  // x. The four rule combinations give the total and per-axis error splits.
  double row_k[kPoints], row_g[kPoints];
  for (int i = 0; i < kPoints; ++i) {
    NeumaierSum rk, rg;
    for (int j = 0; j < kPoints; ++j) {
      double v = f(nx[i], ny[j]);
      rk.add(wk(j) * v);
      rg.add(wg(j) * v);
    }
    row_k[i] = rk.value();
    row_g[i] = rg.value();
  }
  NeumaierSum kk, gg, gk, kg;
  for (int i = 0; i < kPoints; ++i) {
    kk.add(wk(i) * row_k[i]);
    kg.add(wk(i) * row_g[i]);
    gk.add(wg(i) * row_k[i]);
    gg.add(wg(i) * row_g[i]);
  }
  double v_kk = kk.value() * scale;
  double err = std::abs(v_kk - gg.value() * scale);
  double err_x = std::abs(v_kk - gk.value() * scale);
  double err_y = std::abs(v_kk - kg.value() * scale);
  return {ax, bx, ay, by, v_kk, err, err_x, err_y, idx};
}

template <class Cell>
QuadratureOutcome run(std::vector<Cell>& heap, const std::function<double(double)>& target_for_value,
                      long cell_budget, long evaluated,
                      const std::function<void(const Cell&, long&, std::vector<Cell>&)>& split) {
  WorstFirst<Cell> cmp;
  std::make_heap(heap.begin(), heap.end(), cmp);
  double val_sum = 0.0, err_sum = 0.0;
  for (const auto& c : heap) {
    val_sum += c.val;
    err_sum += c.err;
  }
  long next_idx = evaluated;
  while (err_sum > target_for_value(val_sum) && evaluated < cell_budget && err_sum > 0.0) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    Cell worst = heap.back();
    heap.pop_back();
    val_sum -= worst.val;
    err_sum -= worst.err;
    std::size_t first_child = heap.size();
    split(worst, next_idx, heap);
    for (std::size_t i = first_child; i < heap.size(); ++i) {
      val_sum += heap[i].val;
      err_sum += heap[i].err;
      std::push_heap(heap.begin(), heap.begin() + static_cast<std::ptrdiff_t>(i) + 1, cmp);
      ++evaluated;
    }
  }

  // Exact resummation clears the drift the incremental totals accumulate.
  NeumaierSum vs, es;
  for (const auto& c : heap) {
    vs.add(c.val);
    es.add(c.err);
  }
  QuadratureOutcome out;
  out.value = vs.value();
  out.abs_error = es.value();
  out.cells = evaluated;
  out.converged = out.abs_error <= target_for_value(out.value);
  return out;
}

}  // namespace

QuadratureOutcome integrate_unit_interval(const std::function<double(double)>& f,
                                          const std::function<double(double)>& target_for_value,
                                          long cell_budget) {
  std::vector<Cell1> heap;
  heap.push_back(eval_cell(f, 0.0, 1.0, 0));
  std::function<void(const Cell1&, long&, std::vector<Cell1>&)> split =
      [&](const Cell1& c, long& idx, std::vector<Cell1>& out) {
        double m = 0.5 * (c.a + c.b);
        if (m <= c.a || m >= c.b) {  // narrower than one ulp: retire the cell
          Cell1 dead = c;
          dead.err = 0.0;
          out.push_back(dead);
          return;
        }
        out.push_back(eval_cell(f, c.a, m, idx++));
        out.push_back(eval_cell(f, m, c.b, idx++));
      };
  return run<Cell1>(heap, target_for_value, cell_budget, 1, split);
}

QuadratureOutcome integrate_unit_square(const std::function<double(double, double)>& f,
                                        const std::function<double(double)>& target_for_value,
                                        long cell_budget) {
  std::vector<Cell2> heap;
  heap.push_back(eval_cell(f, 0.0, 1.0, 0.0, 1.0, 0));
  std::function<void(const Cell2&, long&, std::vector<Cell2>&)> split =
      [&](const Cell2& c, long& idx, std::vector<Cell2>& out) {
        double mx = 0.5 * (c.ax + c.bx), my = 0.5 * (c.ay + c.by);
        bool x_ok = mx > c.ax && mx < c.bx;
        bool y_ok = my > c.ay && my < c.by;
        bool along_x = x_ok && (c.err_x >= c.err_y || !y_ok);
        if (along_x) {
          out.push_back(eval_cell(f, c.ax, mx, c.ay, c.by, idx++));
          out.push_back(eval_cell(f, mx, c.bx, c.ay, c.by, idx++));
        } else if (y_ok) {
          out.push_back(eval_cell(f, c.ax, c.bx, c.ay, my, idx++));
          out.push_back(eval_cell(f, c.ax, c.bx, my, c.by, idx++));
        } else {  // narrower than one ulp both ways: retire the cell
          Cell2 dead = c;
          dead.err = 0.0;
          out.push_back(dead);
        }
      };
  return run<Cell2>(heap, target_for_value, cell_budget, 1, split);
}

}  // namespace hardylab
