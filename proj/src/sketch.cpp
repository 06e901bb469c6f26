#include "esk/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esk/kernel.hpp"

namespace esk {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

sketch::sketch(std::uint32_t m) : s_(m, kInf), f_(m) {
  if (m == 0) {
    throw invalid_config_error("sketch: m must be at least 1");
  }
}

sketch::sketch(std::vector<double> values, std::vector<edge_key> samples)
    : s_(std::move(values)), f_(std::move(samples)) {
  if (s_.empty() || s_.size() != f_.size()) {
    throw invalid_config_error("sketch: value/sample arrays must be non-empty and equal-sized");
  }
  max_ = -kInf;
  for (std::size_t i = 0; i < s_.size(); ++i) {
    const bool inf_cell = s_[i] == kInf;
    if (inf_cell != f_[i].is_sentinel() || s_[i] <= 0.0 || std::isnan(s_[i])) {
      throw corrupt_file_error("sketch: cell " + std::to_string(i) +
                               " violates the value/sample pairing invariant");
    }
    max_ = std::max(max_, s_[i]);
  }
}

bool sketch::update(const edge_key& id, double rate, std::uint64_t salt) {
  return kernel_update(s_, f_, max_, id, rate, salt).touched;
}

sketch sketch::merge(const sketch& a, const sketch& b) {
  if (a.size() != b.size()) {
    throw incompatible_sketch_error("sketch::merge: sketch sizes differ");
  }
  sketch out(a.size());
  for (std::uint32_t k = 0; k < a.size(); ++k) {
    if (a.s_[k] < b.s_[k]) {
      out.s_[k] = a.s_[k];
      out.f_[k] = a.f_[k];
    } else {
      // Equal finite values must carry the same edge: coordinated sketches
      // write identical (value, key) pairs for a shared edge, so a mismatch
      // means the inputs were built with different salts.
      if (a.s_[k] == b.s_[k] && a.f_[k] != b.f_[k]) {
        throw incompatible_sketch_error(
            "sketch::merge: equal values with different samples (uncoordinated inputs)");
      }
      out.s_[k] = b.s_[k];
      out.f_[k] = b.f_[k];
    }
  }
  out.max_ = *std::max_element(out.s_.begin(), out.s_.end());
  return out;
}

sketch sketch::slice(std::uint32_t begin, std::uint32_t end) const {
  if (begin >= end || end > size()) {
    throw invalid_config_error("sketch::slice: bad position range");
  }
  sketch out(end - begin);
  out.s_.assign(s_.begin() + begin, s_.begin() + end);
  out.f_.assign(f_.begin() + begin, f_.begin() + end);
  out.max_ = *std::max_element(out.s_.begin(), out.s_.end());
  return out;
}

bool sketch::check_invariants() const noexcept {
  double mx = -kInf;
  for (std::size_t i = 0; i < s_.size(); ++i) {
    if ((s_[i] == kInf) != f_[i].is_sentinel()) return false;
    if (!(s_[i] > 0.0)) return false;
    mx = std::max(mx, s_[i]);
  }
  return mx == max_;
}

sketch_store::sketch_store(std::uint32_t m, std::uint64_t salt, stream_mode mode,
                           bool parallel_edges)
    : m_(m), salt_(salt), mode_(mode), parallel_(parallel_edges) {
  // m >= 3 keeps the degree estimator's variance finite
  if (m < 3) {
    throw invalid_config_error("sketch_store: m must be at least 3");
  }
}

void sketch_store::ingest(const weighted_edge& e) {
  if (!(e.weight > 0.0)) {
    throw invalid_weight_error("ingest: edge weight must be positive");
  }
  if (e.u == 0 || e.v == 0) {
    throw reserved_id_error("ingest: node id 0 is reserved");
  }
  if (e.tag != 0 && !parallel_) {
    throw invalid_config_error("ingest: tagged edge requires parallel-edge mode");
  }

  edge_key key = edge_key::canonical(e.u, e.v, e.tag);
  if (parallel_ && e.tag == 0) {
    key.tag = ++pair_seen_[{key.lo, key.hi}];
  }
  if (e.u == e.v) {
    has_self_loops_ = true;
  }

  auto touch = [&](node_id id) {
    auto [it, created] = sketches_.try_emplace(id, m_);
    (void)created;
    it->second.update(key, e.weight, salt_);
  };

  if (mode_ == stream_mode::directed) {
    touch(e.u);
  } else {
    touch(e.u);
    if (e.v != e.u) {
      touch(e.v);
    }
  }
}

const sketch* sketch_store::find(node_id id) const {
  const auto it = sketches_.find(id);
  return it == sketches_.end() ? nullptr : &it->second;
}

const sketch& sketch_store::at(node_id id) const {
  const sketch* sk = find(id);
  if (sk == nullptr) {
    throw missing_node_error("node " + std::to_string(id) + " has no sketch");
  }
  return *sk;
}

sketch_store sketch_store::merge(const sketch_store& a, const sketch_store& b) {
  if (a.m_ != b.m_ || a.salt_ != b.salt_ || a.mode_ != b.mode_ || a.parallel_ != b.parallel_) {
    throw incompatible_sketch_error("sketch_store::merge: store parameters differ");
  }
  sketch_store out(a.m_, a.salt_, a.mode_, a.parallel_);
  out.has_self_loops_ = a.has_self_loops_ || b.has_self_loops_;
  out.sketches_ = a.sketches_;
  for (const auto& [id, sk] : b.sketches_) {
    auto it = out.sketches_.find(id);
    if (it == out.sketches_.end()) {
      out.sketches_.emplace(id, sk);
    } else {
      it->second = sketch::merge(it->second, sk);
    }
  }
  return out;
}

sketch_store sketch_store::slice_positions(std::uint32_t begin, std::uint32_t end) const {
  if (end - begin < 3) {
    throw invalid_config_error("slice_positions: slices need at least 3 positions");
  }
  sketch_store out(end - begin, salt_, mode_, parallel_);
  out.has_self_loops_ = has_self_loops_;
  for (const auto& [id, sk] : sketches_) {
    out.sketches_.emplace(id, sk.slice(begin, end));
  }
  return out;
}

void sketch_store::adopt(node_id id, sketch sk) {
  if (id == 0) {
    throw reserved_id_error("adopt: node id 0 is reserved");
  }
  if (sk.size() != m_) {
    throw incompatible_sketch_error("adopt: sketch size differs from store m");
  }
  sketches_.insert_or_assign(id, std::move(sk));
}

}  // namespace esk
