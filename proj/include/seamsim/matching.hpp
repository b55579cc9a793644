#pragma once

#include <cstdint>
#include <vector>

#include "seamsim/dem.hpp"

namespace seamsim {

struct DecodeResult {
    uint64_t prediction = 0; // observable flip mask
    int64_t weight_scaled = 0;
    double weight = 0;
};

// Matching graph over detectors plus a virtual boundary. Edge weights are
// scaled to int64 so optimal weights compare exactly across algorithms.
class MatchingGraph {
  public:
    static constexpr int64_t kScale = 1'000'000'000;
    static constexpr int64_t kInf = INT64_C(0x3fffffffffffffff);

    explicit MatchingGraph(const DetectorErrorModel& dem);

    uint32_t n_detectors() const { return n_detectors_; }
    size_t n_active() const { return active_.size(); }
    bool active(uint32_t det) const { return compact_[det] >= 0; }

    // exact minimum-weight perfect matching over the defect set
    DecodeResult decode(const std::vector<uint32_t>& defects) const;
    // exhaustive oracle, defect count <= 10
    DecodeResult decode_brute_force(const std::vector<uint32_t>& defects) const;

    // folded defect-to-defect distance: min(direct, via boundary)
    int64_t folded_distance(uint32_t det_a, uint32_t det_b) const;
    int64_t boundary_distance(uint32_t det) const;

  private:
    struct Adj {
        uint32_t to;      // compact node id; boundary = n_active
        int64_t w;
        uint64_t obs;
    };
    uint32_t n_detectors_ = 0;
    std::vector<int32_t> compact_;   // detector -> compact id (-1 inactive)
    std::vector<uint32_t> active_;   // compact id -> detector
    std::vector<std::vector<Adj>> adj_;            // over compact ids + boundary
    std::vector<int64_t> dist_;                    // [src * stride + node]
    std::vector<int32_t> pred_;                    // incoming edge index into adj_[prev]
    std::vector<int32_t> pred_node_;
    size_t stride_ = 0;

    void dijkstra(uint32_t src);
    uint64_t path_obs(uint32_t src, uint32_t dst) const; // XOR along shortest path
    DecodeResult solve_component(const std::vector<uint32_t>& comp) const;
};

} // namespace seamsim
