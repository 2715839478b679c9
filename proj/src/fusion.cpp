#include "xview/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "xview/errors.hpp"
#include "xview/parallel.hpp"

namespace xview {

const char* to_string(FuseMode mode) {
  return mode == FuseMode::concat ? "concat" : "add";
}

FuseMode parse_fuse_mode(const std::string& name) {
  if (name == "concat") return FuseMode::concat;
  if (name == "add") return FuseMode::add;
  throw std::invalid_argument("unknown fuse mode: \"" + name + "\"");
}

int ViewSetConfig::fused_channels() const {
  if (fuse_mode == FuseMode::add) return bev.channels();
  int c = bev.channels();
  for (const ViewEntry& pv : pvs) c += pv.channels();
  return c;
}

void ViewSetConfig::validate() const {
  auto check_entry = [](const ViewEntry& e, const std::string& prefix) {
    if (e.name.empty()) throw ConfigError(prefix + ".name: must be non-empty");
    try {
      e.view.validate();
      e.grid.validate();
    } catch (const std::invalid_argument& err) {
      throw ConfigError(prefix + ": " + err.what());
    }
    if (e.channels() == 0)
      throw ConfigError(prefix + ".features: must select at least one feature");
  };

  check_entry(bev, "bev");
  if (bev.view.kind != ViewKind::cartesian)
    throw ConfigError("bev.kind: the BEV view must be cartesian");
  if (bev.grid.periodic_theta)
    throw ConfigError("bev.grid.periodic_theta: not meaningful for a cartesian grid");
  if (pvs.empty()) throw ConfigError("pvs: at least one perspective view is required");

  std::set<std::string> names{bev.name};
  for (std::size_t j = 0; j < pvs.size(); ++j) {
    const std::string prefix = "pvs[" + std::to_string(j) + "]";
    const ViewEntry& pv = pvs[j];
    check_entry(pv, prefix);
    if (pv.view.kind == ViewKind::cartesian)
      throw ConfigError(prefix + ".kind: perspective views must be spherical or cylindrical");
    if (!names.insert(pv.name).second)
      throw ConfigError(prefix + ".name: duplicate view name \"" + pv.name + "\"");
  }
  if (fuse_mode == FuseMode::add) {
    for (std::size_t j = 0; j < pvs.size(); ++j) {
      if (pvs[j].channels() != bev.channels())
        throw ConfigError("fuse_mode=add requires equal channel counts (bev has " +
                          std::to_string(bev.channels()) + ", pvs[" + std::to_string(j) +
                          "] has " + std::to_string(pvs[j].channels()) + ")");
    }
  }
}

namespace {

struct AxisStencil {
  std::int64_t i0 = 0;
  std::int64_t i1 = 0;
  double frac = 0.0;
};

AxisStencil stencil(double v, double lo, double pitch, std::int32_t bins, bool periodic) {
  AxisStencil s;
  // queries sitting exactly on a voxel center return that voxel's value exactly
  {
    double b = std::floor((v - lo) / pitch);
    b = std::clamp(b, 0.0, static_cast<double>(bins - 1));
    if (v == lo + (b + 0.5) * pitch) {
      s.i0 = s.i1 = static_cast<std::int64_t>(b);
      return s;
    }
  }
  double t = (v - lo) / pitch - 0.5;
  if (periodic) {
    const double fl = std::floor(t);
    s.frac = t - fl;
    auto i = static_cast<std::int64_t>(fl);
    if (i < 0) i += bins;  // first half-voxel pairs with the last bin across the seam
    if (i >= bins) i -= bins;
    s.i0 = i;
    s.i1 = (i + 1 == bins) ? 0 : i + 1;
  } else if (bins == 1) {
    // single-bin axis: the interpolation degenerates to the stored value
  } else {
    t = std::clamp(t, 0.0, static_cast<double>(bins - 1));
    auto i = static_cast<std::int64_t>(std::floor(t));
    i = std::min<std::int64_t>(i, bins - 2);
    s.i0 = i;
    s.i1 = i + 1;
    s.frac = t - static_cast<double>(i);
  }
  return s;
}

}  // namespace

bool interpolate(const FeatureGrid& g, const std::array<double, 3>& q, std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(g.channels()))
    throw std::invalid_argument("interpolate: output span does not match channel count");
  const GridSpec& gs = g.spec();
  const auto v = wrap_values(q, gs);
  for (int a = 0; a < 3; ++a) {
    const bool periodic = gs.periodic_theta && a == kThetaAxis;
    const bool inside = std::isfinite(v[a]) && (periodic || (v[a] >= gs.lo[a] && v[a] < gs.hi[a]));
    if (!inside) {
      std::fill(out.begin(), out.end(), 0.0);
      return false;
    }
  }

  AxisStencil s[3];
  for (int a = 0; a < 3; ++a)
    s[a] = stencil(v[a], gs.lo[a], gs.pitch(a), gs.bins[a], gs.periodic_theta && a == kThetaAxis);

  std::fill(out.begin(), out.end(), 0.0);
  for (int ci = 0; ci < 2; ++ci) {
    const double wi = ci ? s[0].frac : 1.0 - s[0].frac;
    const std::int64_t i = ci ? s[0].i1 : s[0].i0;
    for (int cj = 0; cj < 2; ++cj) {
      const double wj = cj ? s[1].frac : 1.0 - s[1].frac;
      const std::int64_t j = cj ? s[1].i1 : s[1].i0;
      for (int ck = 0; ck < 2; ++ck) {
        const double wk = ck ? s[2].frac : 1.0 - s[2].frac;
        const std::int64_t k = ck ? s[2].i1 : s[2].i0;
        const double w = wi * wj * wk;
        const auto f = g.features((i * gs.bins[1] + j) * gs.bins[2] + k);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * f[c];
      }
    }
  }
  return true;
}

bool interpolate(const FeatureGrid& g, const ViewCoord& q, std::span<double> out) {
  return interpolate(g, q.values(), out);
}

std::vector<double> interpolate(const FeatureGrid& g, const ViewCoord& q, bool* out_of_support) {
  std::vector<double> out(static_cast<std::size_t>(g.channels()), 0.0);
  const bool inside = interpolate(g, q.values(), out);
  if (out_of_support) *out_of_support = !inside;
  return out;
}

namespace {

void check_fusion_inputs(const FeatureGrid& bev, const ViewSetConfig& cfg,
                         const std::vector<FeatureGrid>& pv_grids) {
  cfg.validate();
  if (!(bev.spec() == cfg.bev.grid))
    throw std::invalid_argument("fuse: BEV grid spec does not match the config");
  if (bev.channels() != cfg.bev.channels())
    throw std::invalid_argument("fuse: BEV grid has " + std::to_string(bev.channels()) +
                                " channels, config expects " + std::to_string(cfg.bev.channels()));
  if (pv_grids.size() != cfg.pvs.size())
    throw std::invalid_argument("fuse: expected " + std::to_string(cfg.pvs.size()) +
                                " perspective grids, got " + std::to_string(pv_grids.size()));
  for (std::size_t j = 0; j < pv_grids.size(); ++j) {
    if (!(pv_grids[j].spec() == cfg.pvs[j].grid))
      throw std::invalid_argument("fuse: grid spec mismatch for view \"" + cfg.pvs[j].name + "\"");
    if (pv_grids[j].channels() != cfg.pvs[j].channels())
      throw std::invalid_argument("fuse: channel mismatch for view \"" + cfg.pvs[j].name + "\"");
  }
}

std::vector<ChannelBlock> build_provenance(const ViewSetConfig& cfg) {
  std::vector<ChannelBlock> blocks;
  if (cfg.fuse_mode == FuseMode::concat) {
    int off = 0;
    blocks.push_back({cfg.bev.name, off, cfg.bev.channels()});
    off += cfg.bev.channels();
    for (const ViewEntry& pv : cfg.pvs) {
      blocks.push_back({pv.name, off, pv.channels()});
      off += pv.channels();
    }
  } else {
    // add mode: every view contributes to the same block
    blocks.push_back({cfg.bev.name, 0, cfg.bev.channels()});
    for (const ViewEntry& pv : cfg.pvs) blocks.push_back({pv.name, 0, pv.channels()});
  }
  return blocks;
}

}  // namespace

FusedGrid bdli_fuse(const FeatureGrid& bev, const ViewSetConfig& cfg,
                    const std::vector<FeatureGrid>& pv_grids, int workers) {
  check_fusion_inputs(bev, cfg, pv_grids);
  const bool concat = cfg.fuse_mode == FuseMode::concat;
  const int cb = bev.channels();

  FusedGrid fused;
  fused.grid = FeatureGrid(bev.spec(), cfg.fused_channels());
  fused.provenance = build_provenance(cfg);
  std::copy(bev.occupancy_data().begin(), bev.occupancy_data().end(),
            fused.grid.occupancy_data().begin());
  fused.grid.set_out_of_range(bev.out_of_range());

  parallel_for(0, bev.voxel_count(), workers, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<double> buf(static_cast<std::size_t>(cb));
    for (std::int64_t lin = lo; lin < hi; ++lin) {
      const auto center = voxel_center(index_at(lin, bev.spec()), bev.spec());
      const Point3 cpt{center[0], center[1], center[2]};
      auto dst = fused.grid.features(lin);
      const auto src = bev.features(lin);
      std::copy(src.begin(), src.end(), dst.begin());
      int off = cb;
      for (std::size_t j = 0; j < pv_grids.size(); ++j) {
        const ViewCoord q = to_view(cpt, cfg.pvs[j].view);
        if (concat) {
          const int cj = pv_grids[j].channels();
          interpolate(pv_grids[j], q.values(), dst.subspan(static_cast<std::size_t>(off),
                                                           static_cast<std::size_t>(cj)));
          off += cj;
        } else {
          interpolate(pv_grids[j], q.values(), buf);
          for (int c = 0; c < cb; ++c) dst[static_cast<std::size_t>(c)] += buf[static_cast<std::size_t>(c)];
        }
      }
    }
  });
  return fused;
}

FusedGrid mvf_fuse(const FeatureGrid& bev, const ViewSetConfig& cfg,
                   const std::vector<FeatureGrid>& pv_grids, const PointCloud& points) {
  check_fusion_inputs(bev, cfg, pv_grids);
  const bool concat = cfg.fuse_mode == FuseMode::concat;
  const int cb = bev.channels();
  const int cout = cfg.fused_channels();

  FusedGrid fused;
  fused.grid = FeatureGrid(bev.spec(), cout);
  fused.provenance = build_provenance(cfg);

  struct Rec {
    std::int64_t cell = 0;
    std::array<double, 3> cart{};
  };
  std::vector<Rec> recs;
  recs.reserve(points.size());
  std::uint64_t dropped = 0;
  for (const PointXYZI& pt : points.points) {
    const Point3 p = position(pt);
    const std::array<double, 3> cart{p.x, p.y, p.z};
    if (const auto idx = voxelize(cart, bev.spec()))
      recs.push_back({linear_index(*idx, bev.spec()), cart});
    else
      ++dropped;
  }
  // canonical order, see aggregate()
  std::sort(recs.begin(), recs.end(), [](const Rec& a, const Rec& b) {
    if (a.cell != b.cell) return a.cell < b.cell;
    return a.cart < b.cart;
  });

  std::vector<double> feat(static_cast<std::size_t>(cout));
  std::vector<double> sum(static_cast<std::size_t>(cout));
  std::vector<double> pvbuf(static_cast<std::size_t>(cb));
  std::size_t i = 0;
  while (i < recs.size()) {
    const std::int64_t cell = recs[i].cell;
    std::fill(sum.begin(), sum.end(), 0.0);
    std::uint32_t n = 0;
    std::size_t j = i;
    for (; j < recs.size() && recs[j].cell == cell; ++j, ++n) {
      const auto& cart = recs[j].cart;
      const Point3 p{cart[0], cart[1], cart[2]};
      if (concat) {
        interpolate(bev, cart, std::span<double>(feat.data(), static_cast<std::size_t>(cb)));
        int off = cb;
        for (std::size_t k = 0; k < pv_grids.size(); ++k) {
          const int ck = pv_grids[k].channels();
          interpolate(pv_grids[k], to_view(p, cfg.pvs[k].view).values(),
                      std::span<double>(feat.data() + off, static_cast<std::size_t>(ck)));
          off += ck;
        }
      } else {
        interpolate(bev, cart, std::span<double>(feat.data(), static_cast<std::size_t>(cb)));
        for (std::size_t k = 0; k < pv_grids.size(); ++k) {
          interpolate(pv_grids[k], to_view(p, cfg.pvs[k].view).values(), pvbuf);
          for (int c = 0; c < cb; ++c) feat[static_cast<std::size_t>(c)] += pvbuf[static_cast<std::size_t>(c)];
        }
      }
      for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += feat[c];
    }
    auto dst = fused.grid.features(cell);
    for (std::size_t c = 0; c < sum.size(); ++c) dst[c] = sum[c] / static_cast<double>(n);
    fused.grid.set_occupancy(cell, n);
    i = j;
  }
  fused.grid.set_out_of_range(dropped);
  return fused;
}

}  // namespace xview
