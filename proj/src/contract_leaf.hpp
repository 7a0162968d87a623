#pragma once

#include <array>

#include "spt/contraction.hpp"
#include "spt/task.hpp"

namespace spt::detail {

/// X += contraction over hypercube sub-views, with the k loops innermost.
template <class T>
class ContractLeaf final : public Leaf {
 public:
  ContractLeaf(const Tensor<T>& x, const Tensor<T>& u, const Tensor<T>& v, const ContractionSpec& spec)
      : xs_(x.storage()), us_(u.storage()), vs_(v.storage()), x0_(x.offset()), u0_(u.offset()), v0_(v.offset()),
        side_(x.side()), outer_(spec.u + spec.v), w_(spec.w()), g_(global_strides(spec, x, u, v)) {}

  void run() override {
    T* xd = xs_->data();
    const T* ud = us_->data();
    const T* vd = vs_->data();
    walk([&](index_t xi, index_t ui, index_t vi, bool first, bool last, T& acc) {
      if (first) acc = xd[xi];
      acc += ud[ui] * vd[vi];
      if (last) xd[xi] = acc;
    });
  }

  void accesses(AccessSink& sink) const override {
    walk([&](index_t xi, index_t ui, index_t vi, bool first, bool last, T&) {
      if (first) sink.on_access(xs_->id(), static_cast<std::uint64_t>(xi), false);
      sink.on_access(us_->id(), static_cast<std::uint64_t>(ui), false);
      sink.on_access(vs_->id(), static_cast<std::uint64_t>(vi), false);
      if (last) sink.on_access(xs_->id(), static_cast<std::uint64_t>(xi), true);
    });
  }

  LeafCost cost() const override {
    const std::int64_t m = ipow(side_, w_);
    return {m, m, m};
  }

 private:
  template <class F>
  void walk(F&& f) const {
    std::array<index_t, kMaxOrder * 2> idx{};
    const index_t inner = ipow(side_, w_ - outer_);
    const index_t outer = ipow(side_, outer_);
    T acc{};
    for (index_t o = 0; o < outer; ++o) {
      index_t rem = o;
      for (int g = outer_ - 1; g >= 0; --g) {
        idx[static_cast<std::size_t>(g)] = rem % side_;
        rem /= side_;
      }
      index_t xi = x0_;
      index_t ub = u0_;
      index_t vb = v0_;
      for (int g = 0; g < outer_; ++g) {
        const auto gs = static_cast<std::size_t>(g);
        xi += idx[gs] * g_.x[gs];
        ub += idx[gs] * g_.u[gs];
        vb += idx[gs] * g_.v[gs];
      }
      for (index_t in = 0; in < inner; ++in) {
        index_t r = in;
        index_t ui = ub;
        index_t vi = vb;
        for (int g = w_ - 1; g >= outer_; --g) {
          const auto gs = static_cast<std::size_t>(g);
          const index_t c = r % side_;
          r /= side_;
          ui += c * g_.u[gs];
          vi += c * g_.v[gs];
        }
        f(xi, ui, vi, in == 0, in + 1 == inner, acc);
      }
    }
  }

  Storage<T>* xs_;
  Storage<T>* us_;
  Storage<T>* vs_;
  index_t x0_, u0_, v0_;
  index_t side_;
  int outer_;
  int w_;
  GlobalStrides g_;
};

}  // namespace spt::detail
