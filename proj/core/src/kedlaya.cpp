#include "hardylab/kedlaya.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <queue>

#include "hardylab/errors.hpp"
#include "hardylab/numerics.hpp"

namespace hardylab::kedlaya {

namespace {

struct Dinic {
  struct Edge {
    int to;
    long cap;
    int rev;
  };
  std::vector<std::vector<Edge>> g;
  std::vector<int> level, it;

  explicit Dinic(int nodes) : g(static_cast<std::size_t>(nodes)), level(g.size()), it(g.size()) {}

  void add_edge(int a, int b, long cap) {
    g[static_cast<std::size_t>(a)].push_back({b, cap, static_cast<int>(g[static_cast<std::size_t>(b)].size())});
    g[static_cast<std::size_t>(b)].push_back({a, 0, static_cast<int>(g[static_cast<std::size_t>(a)].size()) - 1});
  }

  bool bfs(int s, int t) {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const auto& e : g[static_cast<std::size_t>(v)]) {
        if (e.cap > 0 && level[static_cast<std::size_t>(e.to)] < 0) {
          level[static_cast<std::size_t>(e.to)] = level[static_cast<std::size_t>(v)] + 1;
          q.push(e.to);
        }
      }
    }
    return level[static_cast<std::size_t>(t)] >= 0;
  }

  long dfs(int v, int t, long f) {
    if (v == t) return f;
    for (int& i = it[static_cast<std::size_t>(v)]; i < static_cast<int>(g[static_cast<std::size_t>(v)].size()); ++i) {
      Edge& e = g[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)];
      if (e.cap <= 0 || level[static_cast<std::size_t>(e.to)] != level[static_cast<std::size_t>(v)] + 1) continue;
      long d = dfs(e.to, t, std::min(f, e.cap));
      if (d > 0) {
        e.cap -= d;
        g[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(e.rev)].cap += d;
        return d;
      }
    }
    return 0;
  }

  long max_flow(int s, int t) {
    long flow = 0;
    while (bfs(s, t)) {
      std::fill(it.begin(), it.end(), 0);
      while (long f = dfs(s, t, std::numeric_limits<long>::max())) flow += f;
    }
    return flow;
  }
};

}  // namespace

long factorial(int n) {
  if (n < 0 || n > 20) throw DomainError("factorial argument out of range");
  long f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

long alpha(int n, long p, int s) {
  if (n < 1) throw DomainError("n must be positive");
  long size = factorial(n);
  if (p < 1 || p > size) throw DomainError("row index out of range");
  if (s < 1 || s > n) throw DomainError("value out of range");
  long block = factorial(n - 1);
  long c = (p + block - 1) / block;  // ceil(p / (n-1)!)
  return s <= c ? size / c : 0;
}

KedlayaMatrix build(int n, int max_n) {
  if (n < 1) throw DomainError("n must be positive");
  if (max_n > 6) max_n = 6;  // one-byte storage and n!^2 memory end here
  if (n > max_n) throw DomainError("n exceeds the configured cap");

  const long size = factorial(n);
  KedlayaMatrix K{n, size, std::vector<std::uint8_t>(static_cast<std::size_t>(size * size))};

  // Place one value at a time, largest first: route all appearances of s
  // into the still-empty cells (entry 0) by a single bipartite max-flow with
  // the row and column counts as margins. Large values live in the small
  // bottom-right region of blocks, so handling them first keeps the loose
  // freedom for the ubiquitous small values.
  const int source = 0, sink = static_cast<int>(2 * size) + 1;
  for (int s = n; s >= 1; --s) {
    Dinic net(sink + 1);
    long total = 0;
    for (long p = 1; p <= size; ++p) {
      long a = alpha(n, p, s);
      if (a == 0) continue;
      total += a;
      net.add_edge(source, static_cast<int>(p), a);
      net.add_edge(static_cast<int>(size + p), sink, a);
      for (long q = 1; q <= size; ++q)
        if (alpha(n, q, s) > 0 && K.entries[static_cast<std::size_t>((p - 1) * size + (q - 1))] == 0)
          net.add_edge(static_cast<int>(p), static_cast<int>(size + q), 1);
    }
    if (net.max_flow(source, sink) != total)
      throw Error("construction failed: value placement became infeasible");
    for (long p = 1; p <= size; ++p) {
      for (const auto& e : net.g[static_cast<std::size_t>(p)]) {
        if (e.to > size && e.to < sink && e.cap == 0)
          K.entries[static_cast<std::size_t>((p - 1) * size + (e.to - size - 1))] =
              static_cast<std::uint8_t>(s);
      }
    }
  }
  return K;
}

std::vector<Violation> verify(const KedlayaMatrix& K) {
  std::vector<Violation> out;
  const long size = K.size;
  std::array<long, 7> count{};
  for (long p = 1; p <= size; ++p) {
    count.fill(0);
    for (long q = 0; q < size; ++q) {
      int v = K.at(p - 1, q);
      if (v >= 1 && v <= K.n) ++count[static_cast<std::size_t>(v)];
    }
    for (int s = 1; s <= K.n; ++s) {
      long expected = alpha(K.n, p, s);
      if (count[static_cast<std::size_t>(s)] != expected)
        out.push_back({'r', p, s, expected, count[static_cast<std::size_t>(s)]});
    }
  }
  for (long q = 1; q <= size; ++q) {
    count.fill(0);
    for (long p = 0; p < size; ++p) {
      int v = K.at(p, q - 1);
      if (v >= 1 && v <= K.n) ++count[static_cast<std::size_t>(v)];
    }
    for (int s = 1; s <= K.n; ++s) {
      long expected = alpha(K.n, q, s);
      if (count[static_cast<std::size_t>(s)] != expected)
        out.push_back({'c', q, s, expected, count[static_cast<std::size_t>(s)]});
    }
  }
  return out;
}

MixingCheck check_mixing_inequality(const MeanExpr& e, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n < 1) throw DomainError("x must be nonempty");
  if (n > 5) throw DomainError("mixing check supports up to 5 entries");

  const double nf = static_cast<double>(factorial(n));
  const double block = static_cast<double>(factorial(n - 1));

  NeumaierSum lhs;
  std::vector<SampleEntry> prefix;
  for (int i = 1; i <= n; ++i) {
    prefix.clear();
    double w = nf / i;
    for (int j = 0; j < i; ++j) prefix.push_back({x[static_cast<std::size_t>(j)], w});
    lhs.add(eval_mean(e, WeightedSample(prefix)));
  }

  NeumaierSum running;
  std::vector<SampleEntry> averages;
  for (int i = 1; i <= n; ++i) {
    running.add(x[static_cast<std::size_t>(i - 1)]);
    averages.push_back({running.value() / i, block});
  }
  double rhs = n * eval_mean(e, WeightedSample(averages));

  std::vector<SampleEntry> harmonic;
  for (int i = 1; i <= n; ++i) harmonic.push_back({1.0 / i, block});
  double corollary_rhs = n * eval_mean(e, WeightedSample(harmonic)) * running.value();

  MixingCheck out;
  out.lhs = lhs.value();
  out.rhs = rhs;
  out.holds = out.lhs <= rhs * (1.0 + 1e-12);
  out.corollary_rhs = corollary_rhs;
  out.corollary_holds = out.lhs <= corollary_rhs * (1.0 + 1e-12);
  return out;
}

}  // namespace hardylab::kedlaya
