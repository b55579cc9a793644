#include "seamsim/matching.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>

namespace seamsim {

namespace {

// Primal-dual maximum-weight matching on a dense general graph (O(n^3)),
// integer weights, 1-based nodes, blossoms stored as pseudo-nodes. With all
// pair weights strictly positive and an even complete graph the maximum
// weight matching is perfect, which is how decode() uses it.
struct Blossom {
    struct E {
        int u, v;
        int64_t w;
    };
    int n = 0, n_x = 0;
    std::vector<std::vector<E>> g;
    std::vector<int64_t> lab;
    std::vector<int> match, slack, st, pa, S, vis;
    std::vector<std::vector<int>> flower, flower_from;
    std::queue<int> q;
    int lca_t = 0;

    void init(int n_) {
        n = n_;
        int m = 2 * n + 1;
        if ((int)g.size() < m) {
            g.assign(m, std::vector<E>(m));
            lab.assign(m, 0);
            match.assign(m, 0);
            slack.assign(m, 0);
            st.assign(m, 0);
            pa.assign(m, 0);
            S.assign(m, 0);
            vis.assign(m, 0);
            flower.assign(m, {});
            flower_from.assign(m, std::vector<int>(m, 0));
        }
        for (int u = 0; u < m; u++) {
            match[u] = 0;
            vis[u] = 0;
            for (int v = 0; v < m; v++) g[u][v] = {u, v, 0};
        }
        lca_t = 0;
    }
    void add_edge(int u, int v, int64_t w) { g[u][v].w = g[v][u].w = w; }

    int64_t e_delta(const E& e) const { return lab[e.u] + lab[e.v] - g[e.u][e.v].w * 2; }
    void update_slack(int u, int x) {
        if (!slack[x] || e_delta(g[u][x]) < e_delta(g[slack[x]][x])) slack[x] = u;
    }
    void set_slack(int x) {
        slack[x] = 0;
        for (int u = 1; u <= n; u++)
            if (g[u][x].w > 0 && st[u] != x && S[st[u]] == 0) update_slack(u, x);
    }
    void q_push(int x) {
        if (x <= n) {
            q.push(x);
            return;
        }
        for (int y : flower[x]) q_push(y);
    }
    void set_st(int x, int b) {
        st[x] = b;
        if (x > n)
            for (int y : flower[x]) set_st(y, b);
    }
    int get_pr(int b, int xr) {
        int pr = (int)(std::find(flower[b].begin(), flower[b].end(), xr) - flower[b].begin());
        if (pr % 2 == 1) {
            std::reverse(flower[b].begin() + 1, flower[b].end());
            return (int)flower[b].size() - pr;
        }
        return pr;
    }
    void set_match(int u, int v) {
        match[u] = g[u][v].v;
        if (u <= n) return;
        E& e = g[u][v];
        int xr = flower_from[u][e.u];
        int pr = get_pr(u, xr);
        for (int i = 0; i < pr; i++) set_match(flower[u][i], flower[u][i ^ 1]);
        set_match(xr, v);
        std::rotate(flower[u].begin(), flower[u].begin() + pr, flower[u].end());
    }
    void augment(int u, int v) {
        while (true) {
            int xnv = st[match[u]];
            set_match(u, v);
            if (!xnv) return;
            set_match(xnv, st[pa[xnv]]);
            u = st[pa[xnv]];
            v = xnv;
        }
    }
    int get_lca(int u, int v) {
        for (++lca_t; u || v; std::swap(u, v)) {
            if (u == 0) continue;
            if (vis[u] == lca_t) return u;
            vis[u] = lca_t;
            u = st[match[u]];
            if (u) u = st[pa[u]];
        }
        return 0;
    }
    void add_blossom(int u, int lca, int v) {
        int b = n + 1;
        while (b <= n_x && st[b]) b++;
        if (b > n_x) n_x++;
        lab[b] = 0;
        S[b] = 0;
        match[b] = match[lca];
        flower[b].clear();
        flower[b].push_back(lca);
        for (int x = u, y; x != lca; x = st[pa[y]]) {
            flower[b].push_back(x);
            flower[b].push_back(y = st[match[x]]);
            q_push(y);
        }
        std::reverse(flower[b].begin() + 1, flower[b].end());
        for (int x = v, y; x != lca; x = st[pa[y]]) {
            flower[b].push_back(x);
            flower[b].push_back(y = st[match[x]]);
            q_push(y);
        }
        set_st(b, b);
        for (int x = 1; x <= n_x; x++) g[b][x].w = g[x][b].w = 0;
        for (int x = 1; x <= n; x++) flower_from[b][x] = 0;
        for (int xs : flower[b]) {
            for (int x = 1; x <= n_x; x++)
                if (g[b][x].w == 0 || e_delta(g[xs][x]) < e_delta(g[b][x])) {
                    g[b][x] = g[xs][x];
                    g[x][b] = g[x][xs];
                }
            for (int x = 1; x <= n; x++)
                if (flower_from[xs][x]) flower_from[b][x] = xs;
        }
        set_slack(b);
    }
    void expand_blossom(int b) {
        for (int x : flower[b]) set_st(x, x);
        int xr = flower_from[b][g[b][pa[b]].u];
        int pr = get_pr(b, xr);
        for (int i = 0; i < pr; i += 2) {
            int xs = flower[b][i], xns = flower[b][i + 1];
            pa[xs] = g[xns][xs].u;
            S[xs] = 1;
            S[xns] = 0;
            slack[xs] = 0;
            set_slack(xns);
            q_push(xns);
        }
        S[xr] = 1;
        pa[xr] = pa[b];
        for (int i = pr + 1; i < (int)flower[b].size(); i++) {
            int xs = flower[b][i];
            S[xs] = -1;
            set_slack(xs);
        }
        st[b] = 0;
    }
    bool on_found_edge(const E& e) {
        int u = st[e.u], v = st[e.v];
        if (S[v] == -1) {
            pa[v] = e.u;
            S[v] = 1;
            int nu = st[match[v]];
            slack[v] = slack[nu] = 0;
            S[nu] = 0;
            q_push(nu);
        } else if (S[v] == 0) {
            int lca = get_lca(u, v);
            if (!lca) {
                augment(u, v);
                augment(v, u);
                return true;
            }
            add_blossom(u, lca, v);
        }
        return false;
    }
    bool matching_round() {
        std::fill(S.begin(), S.begin() + n_x + 1, -1);
        std::fill(slack.begin(), slack.begin() + n_x + 1, 0);
        q = {};
        for (int x = 1; x <= n_x; x++)
            if (st[x] == x && !match[x]) {
                pa[x] = 0;
                S[x] = 0;
                q_push(x);
            }
        if (q.empty()) return false;
        while (true) {
            while (!q.empty()) {
                int u = q.front();
                q.pop();
                if (S[st[u]] == 1) continue;
                for (int v = 1; v <= n; v++)
                    if (g[u][v].w > 0 && st[u] != st[v]) {
                        if (e_delta(g[u][v]) == 0) {
                            if (on_found_edge(g[u][v])) return true;
                        } else {
                            update_slack(u, st[v]);
                        }
                    }
            }
            int64_t d = INT64_MAX;
            for (int b = n + 1; b <= n_x; b++)
                if (st[b] == b && S[b] == 1) d = std::min(d, lab[b] / 2);
            for (int x = 1; x <= n_x; x++)
                if (st[x] == x && slack[x]) {
                    if (S[x] == -1)
                        d = std::min(d, e_delta(g[slack[x]][x]));
                    else if (S[x] == 0)
                        d = std::min(d, e_delta(g[slack[x]][x]) / 2);
                }
            for (int u = 1; u <= n; u++) {
                if (S[st[u]] == 0) {
                    if (lab[u] <= d) return false; // hungarian forest exhausted
                    lab[u] -= d;
                } else if (S[st[u]] == 1) {
                    lab[u] += d;
                }
            }
            for (int b = n + 1; b <= n_x; b++)
                if (st[b] == b) {
                    if (S[b] == 0)
                        lab[b] += d * 2;
                    else if (S[b] == 1)
                        lab[b] -= d * 2;
                }
            q = {};
            for (int x = 1; x <= n_x; x++)
                if (st[x] == x && slack[x] && st[slack[x]] != x &&
                    e_delta(g[slack[x]][x]) == 0)
                    if (on_found_edge(g[slack[x]][x])) return true;
            for (int b = n + 1; b <= n_x; b++)
                if (st[b] == b && S[b] == 1 && lab[b] == 0) expand_blossom(b);
        }
    }
    // returns matched partner array (1-based, 0 = unmatched)
    void solve() {
        n_x = n;
        for (int u = 0; u <= 2 * n; u++) {
            st[u] = u;
            flower[u].clear();
        }
        int64_t w_max = 0;
        for (int u = 1; u <= n; u++)
            for (int v = 1; v <= n; v++) {
                flower_from[u][v] = (u == v ? u : 0);
                w_max = std::max(w_max, g[u][v].w);
            }
        for (int u = 1; u <= n; u++) lab[u] = w_max;
        while (matching_round()) {}
    }
};

thread_local Blossom tls_blossom;

} // namespace

MatchingGraph::MatchingGraph(const DetectorErrorModel& dem) {
    n_detectors_ = dem.n_detectors;
    compact_.assign(n_detectors_, -1);
    for (const DemEdge& e : dem.edges) {
        if (e.p <= 0 || e.p >= 0.5 + 1e-12) continue;
        if (compact_[e.d1] < 0) {
            compact_[e.d1] = (int32_t)active_.size();
            active_.push_back(e.d1);
        }
        if (e.d2 >= 0 && compact_[e.d2] < 0) {
            compact_[e.d2] = (int32_t)active_.size();
            active_.push_back(e.d2);
        }
    }
    size_t A = active_.size();
    stride_ = A + 1; // + boundary node
    adj_.assign(stride_, {});
    for (const DemEdge& e : dem.edges) {
        if (e.p <= 0) continue;
        int64_t w = (int64_t)std::llround(e.weight * (double)kScale);
        if (w < 1) w = 1; // probabilities at 0.5 would give weight 0
        uint32_t a = (uint32_t)compact_[e.d1];
        uint32_t b = e.d2 >= 0 ? (uint32_t)compact_[e.d2] : (uint32_t)A;
        adj_[a].push_back({b, w, e.observables});
        adj_[b].push_back({a, w, e.observables});
    }
    for (auto& v : adj_)
        std::sort(v.begin(), v.end(), [](const Adj& x, const Adj& y) {
            if (x.to != y.to) return x.to < y.to;
            if (x.w != y.w) return x.w < y.w;
            return x.obs < y.obs;
        });
    dist_.assign(A * stride_, kInf);
    pred_.assign(A * stride_, -1);
    pred_node_.assign(A * stride_, -1);
    for (uint32_t s = 0; s < A; s++) dijkstra(s);
}

void MatchingGraph::dijkstra(uint32_t src) {
    int64_t* dist = &dist_[(size_t)src * stride_];
    int32_t* pred = &pred_[(size_t)src * stride_];
    int32_t* pnode = &pred_node_[(size_t)src * stride_];
    using QE = std::pair<int64_t, uint32_t>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    dist[src] = 0;
    pq.push({0, src});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d != dist[u]) continue;
        for (size_t k = 0; k < adj_[u].size(); k++) {
            const Adj& e = adj_[u][k];
            int64_t nd = d + e.w;
            if (nd < dist[e.to]) {
                dist[e.to] = nd;
                pred[e.to] = (int32_t)k;
                pnode[e.to] = (int32_t)u;
                pq.push({nd, e.to});
            }
        }
    }
}

int64_t MatchingGraph::boundary_distance(uint32_t det) const {
    int32_t c = compact_[det];
    if (c < 0) return kInf;
    return dist_[(size_t)c * stride_ + (stride_ - 1)];
}

int64_t MatchingGraph::folded_distance(uint32_t det_a, uint32_t det_b) const {
    int32_t a = compact_[det_a], b = compact_[det_b];
    if (a < 0 || b < 0) return kInf;
    return dist_[(size_t)a * stride_ + b];
}

uint64_t MatchingGraph::path_obs(uint32_t src, uint32_t dst) const {
    // src/dst are compact ids; walks the shortest-path tree of src
    uint64_t obs = 0;
    const int32_t* pred = &pred_[(size_t)src * stride_];
    const int32_t* pnode = &pred_node_[(size_t)src * stride_];
    uint32_t node = dst;
    while (node != src) {
        int32_t pn = pnode[node], pe = pred[node];
        if (pn < 0) throw std::runtime_error("disconnected defect (no path found)");
        obs ^= adj_[pn][pe].obs;
        node = (uint32_t)pn;
    }
    return obs;
}

DecodeResult MatchingGraph::solve_component(const std::vector<uint32_t>& comp) const {
    // comp holds compact ids; appends a virtual boundary-proxy node when odd
    DecodeResult out;
    size_t m = comp.size();
    uint32_t B = (uint32_t)(stride_ - 1);
    if (m == 1) {
        int64_t d = dist_[(size_t)comp[0] * stride_ + B];
        if (d >= kInf) throw std::runtime_error("defect cannot reach the boundary");
        out.weight_scaled = d;
        out.prediction = path_obs(comp[0], B);
        return out;
    }
    bool odd = m % 2;
    size_t nn = m + odd;
    Blossom& bl = tls_blossom;
    bl.init((int)nn);
    int64_t big = 1;
    auto pair_dist = [&](size_t i, size_t j) -> int64_t {
        return dist_[(size_t)comp[i] * stride_ + comp[j]];
    };
    auto bdry = [&](size_t i) -> int64_t { return dist_[(size_t)comp[i] * stride_ + B]; };
    for (size_t i = 0; i < m; i++) {
        for (size_t j = i + 1; j < m; j++) {
            int64_t d = pair_dist(i, j);
            if (d < kInf) big = std::max(big, d);
        }
        int64_t d = bdry(i);
        if (d < kInf) big = std::max(big, d);
    }
    big += 1;
    for (size_t i = 0; i < m; i++) {
        for (size_t j = i + 1; j < m; j++) {
            int64_t d = pair_dist(i, j);
            if (d < kInf) bl.add_edge((int)i + 1, (int)j + 1, big - d);
        }
        if (odd) {
            int64_t d = bdry(i);
            if (d < kInf) bl.add_edge((int)i + 1, (int)m + 1, big - d);
        }
    }
    bl.solve();
    for (size_t i = 0; i < nn; i++) {
        int mi = bl.match[(int)i + 1];
        if (mi == 0) throw std::runtime_error("matching failed: disconnected defect");
        size_t j = (size_t)mi - 1;
        if (j < i) continue;
        if (odd && j == m) {
            // matched to the boundary proxy
            out.weight_scaled += bdry(i);
            out.prediction ^= path_obs(comp[i], B);
        } else {
            int64_t d = pair_dist(i, j);
            if (d >= kInf) throw std::runtime_error("matched pair has no path");
            out.weight_scaled += d;
            out.prediction ^= path_obs(comp[i], (uint32_t)comp[j]);
        }
    }
    return out;
}

DecodeResult MatchingGraph::decode(const std::vector<uint32_t>& defects) const {
    DecodeResult out;
    if (defects.empty()) return out;
    std::vector<uint32_t> comp_ids;
    comp_ids.reserve(defects.size());
    for (uint32_t d : defects) {
        if (d >= n_detectors_ || compact_[d] < 0)
            throw std::runtime_error("defect detector " + std::to_string(d) +
                                     " has no incident error mechanism");
        comp_ids.push_back((uint32_t)compact_[d]);
    }
    size_t m = comp_ids.size();
    uint32_t B = (uint32_t)(stride_ - 1);
    // cluster decomposition: a cross pair whose distance equals the
    // through-boundary route can always be rerouted to the boundary
    std::vector<uint32_t> parent(m);
    for (uint32_t i = 0; i < m; i++) parent[i] = i;
    std::function<uint32_t(uint32_t)> find = [&](uint32_t x) -> uint32_t {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t i = 0; i < m; i++)
        for (size_t j = i + 1; j < m; j++) {
            int64_t d = dist_[(size_t)comp_ids[i] * stride_ + comp_ids[j]];
            int64_t via = dist_[(size_t)comp_ids[i] * stride_ + B] +
                          dist_[(size_t)comp_ids[j] * stride_ + B];
            if (d < via) parent[find((uint32_t)i)] = find((uint32_t)j);
        }
    std::vector<std::vector<uint32_t>> groups(m);
    for (uint32_t i = 0; i < m; i++) groups[find(i)].push_back(comp_ids[i]);
    for (auto& gset : groups) {
        if (gset.empty()) continue;
        DecodeResult r = solve_component(gset);
        out.weight_scaled += r.weight_scaled;
        out.prediction ^= r.prediction;
    }
    out.weight = (double)out.weight_scaled / (double)kScale;
    return out;
}

DecodeResult MatchingGraph::decode_brute_force(const std::vector<uint32_t>& defects) const {
    if (defects.size() > 10)
        throw std::invalid_argument("brute-force decoder limited to 10 defects");
    DecodeResult out;
    if (defects.empty()) return out;
    std::vector<uint32_t> ids;
    for (uint32_t d : defects) {
        if (d >= n_detectors_ || compact_[d] < 0)
            throw std::runtime_error("defect detector has no incident error mechanism");
        ids.push_back((uint32_t)compact_[d]);
    }
    uint32_t B = (uint32_t)(stride_ - 1);
    size_t m = ids.size();
    int64_t best = kInf;
    uint64_t best_obs = 0;
    std::vector<char> used(m, 0);
    std::function<void(int64_t, uint64_t)> rec = [&](int64_t w, uint64_t obs) {
        if (w >= best) return;
        size_t i = 0;
        while (i < m && used[i]) i++;
        if (i == m) {
            best = w;
            best_obs = obs;
            return;
        }
        used[i] = 1;
        int64_t db = dist_[(size_t)ids[i] * stride_ + B];
        if (db < kInf) rec(w + db, obs ^ path_obs(ids[i], B));
        for (size_t j = i + 1; j < m; j++) {
            if (used[j]) continue;
            int64_t d = dist_[(size_t)ids[i] * stride_ + ids[j]];
            if (d >= kInf) continue;
            used[j] = 1;
            rec(w + d, obs ^ path_obs(ids[i], ids[j]));
            used[j] = 0;
        }
        used[i] = 0;
    };
    rec(0, 0);
    if (best >= kInf) throw std::runtime_error("no feasible assignment (disconnected defect)");
    out.weight_scaled = best;
    out.prediction = best_obs;
    out.weight = (double)best / (double)kScale;
    return out;
}

} // namespace seamsim
