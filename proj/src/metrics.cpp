#include "sarmot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "sarmot/hungarian.hpp"

namespace sarmot {

namespace {

using FrameBoxes = std::vector<std::pair<int, BBox>>;
using ByFrame = std::map<int, FrameBoxes>;

constexpr double kInf = std::numeric_limits<double>::infinity();

const FrameBoxes& boxes_at(const ByFrame& m, int frame) {
  static const FrameBoxes kEmpty;
  const auto it = m.find(frame);
  return it == m.end() ? kEmpty : it->second;
}

std::vector<int> all_frames(const ByFrame& a, const ByFrame& b) {
  std::vector<int> frames;
  for (const auto& [f, _] : a) frames.push_back(f);
  for (const auto& [f, _] : b) frames.push_back(f);
  std::sort(frames.begin(), frames.end());
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
  return frames;
}

// IoU-threshold matching within one frame: pairs below `thr` are forbidden.
AssociationResult match_frame(const FrameBoxes& g, const FrameBoxes& p, double thr) {
  CostMatrix cost(static_cast<int>(g.size()), static_cast<int>(p.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double v = iou(g[i].second, p[j].second);
      cost(static_cast<int>(i), static_cast<int>(j)) = v >= thr ? 1.0 - v : kInf;
    }
  }
  return hungarian(cost);
}

}  // namespace

ClearMot clear_mot(const TrajectorySet& gt, const TrajectorySet& pred, double iou_thr) {
  if (gt.empty()) throw DataError("clear_mot: ground truth is empty (MOTA undefined)");
  const ByFrame g_frames = gt.by_frame();
  const ByFrame p_frames = pred.by_frame();

  ClearMot r;
  r.gt_boxes = static_cast<int>(gt.box_count());
  r.gt_tracks = static_cast<int>(gt.tracks().size());

  std::unordered_map<int, int> current;     // gt id -> pred id matched in the previous frame
  std::unordered_map<int, int> last_match;  // gt id -> pred id of its latest match
  std::unordered_map<int, int> covered;     // gt id -> matched frame count

  for (int f : all_frames(g_frames, p_frames)) {
    const FrameBoxes& g = boxes_at(g_frames, f);
    const FrameBoxes& p = boxes_at(p_frames, f);
    std::vector<char> g_used(g.size(), 0), p_used(p.size(), 0);
    std::unordered_map<int, int> next;

    // Keep last frame's pairings that are still valid.
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto it = current.find(g[i].first);
      if (it == current.end()) continue;
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (p_used[j] || p[j].first != it->second) continue;
        if (iou(g[i].second, p[j].second) >= iou_thr) {
          g_used[i] = p_used[j] = 1;
          next[g[i].first] = p[j].first;
        }
        break;
      }
    }

    FrameBoxes g_rest, p_rest;
    std::vector<std::size_t> g_map, p_map;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g_used[i]) {
        g_rest.push_back(g[i]);
        g_map.push_back(i);
      }
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (!p_used[j]) {
        p_rest.push_back(p[j]);
        p_map.push_back(j);
      }
    }
    const AssociationResult m = match_frame(g_rest, p_rest, iou_thr);
    for (const auto& [a, b] : m.matches) {
      const int gid = g_rest[a].first;
      const int pid = p_rest[b].first;
      const auto lm = last_match.find(gid);
      if (lm != last_match.end() && lm->second != pid) ++r.idsw;
      g_used[g_map[a]] = p_used[p_map[b]] = 1;
      next[gid] = pid;
    }
    for (const auto& [gid, pid] : next) {
      last_match[gid] = pid;
      ++covered[gid];
    }
    for (char u : g_used) r.fn += u ? 0 : 1;
    for (char u : p_used) r.fp += u ? 0 : 1;
    current = std::move(next);
  }

  r.mota = 1.0 - static_cast<double>(r.fp + r.fn + r.idsw) / r.gt_boxes;
  for (const auto& t : gt.tracks()) {
    const double ratio = static_cast<double>(covered[t.id]) / static_cast<double>(t.points.size());
    if (ratio >= 0.8) ++r.mt;
    if (ratio <= 0.2) ++r.ml;
  }
  return r;
}

IdMetrics id_metrics(const TrajectorySet& gt, const TrajectorySet& pred, double iou_thr) {
  IdMetrics r;
  const int n_gt_boxes = static_cast<int>(gt.box_count());
  const int n_pred_boxes = static_cast<int>(pred.box_count());
  if (n_gt_boxes == 0 && n_pred_boxes == 0) {
    r.idf1 = r.idp = r.idr = 1.0;
    return r;
  }

  const auto& gts = gt.tracks();
  const auto& prs = pred.tracks();
  // overlap[i][j]: frames where gt i and pred j both exist with IoU >= thr.
  CostMatrix overlap(static_cast<int>(gts.size()), static_cast<int>(prs.size()));
  std::vector<std::map<int, const BBox*>> pred_index(prs.size());
  for (std::size_t j = 0; j < prs.size(); ++j) {
    for (const auto& pt : prs[j].points) pred_index[j][pt.frame] = &pt.bbox;
  }
  for (std::size_t i = 0; i < gts.size(); ++i) {
    for (std::size_t j = 0; j < prs.size(); ++j) {
      int count = 0;
      for (const auto& pt : gts[i].points) {
        const auto it = pred_index[j].find(pt.frame);
        if (it != pred_index[j].end() && iou(pt.bbox, *it->second) >= iou_thr) ++count;
      }
      overlap(static_cast<int>(i), static_cast<int>(j)) = count;
    }
  }

  // Maximizing total overlap == minimizing IDFN + IDFP.
  CostMatrix cost(overlap.rows(), overlap.cols());
  for (int i = 0; i < cost.rows(); ++i) {
    for (int j = 0; j < cost.cols(); ++j) cost(i, j) = -overlap(i, j);
  }
  const AssociationResult m = hungarian(cost);
  for (const auto& [i, j] : m.matches) r.idtp += static_cast<int>(overlap(i, j));
  r.idfn = n_gt_boxes - r.idtp;
  r.idfp = n_pred_boxes - r.idtp;
  r.idp = (r.idtp + r.idfp) > 0 ? static_cast<double>(r.idtp) / (r.idtp + r.idfp) : 0.0;
  r.idr = (r.idtp + r.idfn) > 0 ? static_cast<double>(r.idtp) / (r.idtp + r.idfn) : 0.0;
  r.idf1 = 2.0 * r.idtp / (2.0 * r.idtp + r.idfp + r.idfn);
  return r;
}

HotaMetrics hota(const TrajectorySet& gt, const TrajectorySet& pred) {
  if (gt.empty()) throw DataError("hota: ground truth is empty");
  const ByFrame g_frames = gt.by_frame();
  const ByFrame p_frames = pred.by_frame();
  const std::vector<int> frames = all_frames(g_frames, p_frames);

  std::map<int, int> gt_len, pred_len;
  for (const auto& t : gt.tracks()) gt_len[t.id] = static_cast<int>(t.points.size());
  for (const auto& t : pred.tracks()) pred_len[t.id] = static_cast<int>(t.points.size());
  const int n_gt = static_cast<int>(gt.box_count());
  const int n_pred = static_cast<int>(pred.box_count());

  HotaMetrics r;
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < HotaMetrics::kAlphaCount; ++k) {
    const double alpha = HotaMetrics::alpha(k) - 1e-12;
    std::map<std::pair<int, int>, int> pair_tp;
    std::vector<std::pair<int, int>> tps;
    for (int f : frames) {
      const FrameBoxes& g = boxes_at(g_frames, f);
      const FrameBoxes& p = boxes_at(p_frames, f);
      const AssociationResult m = match_frame(g, p, alpha);
      for (const auto& [a, b] : m.matches) {
        const std::pair<int, int> key{g[a].first, p[b].first};
        ++pair_tp[key];
        tps.push_back(key);
      }
    }
    const int tp = static_cast<int>(tps.size());
    const int fn = n_gt - tp;
    const int fp = n_pred - tp;
    double ass_sum = 0.0;
    for (const auto& key : tps) {
      const int tpa = pair_tp[key];
      const int fna = gt_len[key.first] - tpa;
      const int fpa = pred_len[key.second] - tpa;
      ass_sum += static_cast<double>(tpa) / (tpa + fna + fpa);
    }
    const double deta = static_cast<double>(tp) / std::max(1, tp + fn + fp);
    const double assa = ass_sum / std::max(1, tp);
    r.deta_alpha[k] = deta;
    r.assa_alpha[k] = assa;
    r.hota_alpha[k] = std::sqrt(deta * assa);
  }
  for (int k = 0; k < HotaMetrics::kAlphaCount; ++k) {
    r.hota += r.hota_alpha[k];
    r.deta += r.deta_alpha[k];
    r.assa += r.assa_alpha[k];
  }
  r.hota /= HotaMetrics::kAlphaCount;
  r.deta /= HotaMetrics::kAlphaCount;
  r.assa /= HotaMetrics::kAlphaCount;
  return r;
}

MetricsReport evaluate(const TrajectorySet& gt, const TrajectorySet& pred, double iou_thr) {
  return {clear_mot(gt, pred, iou_thr), id_metrics(gt, pred, iou_thr), hota(gt, pred)};
}

}  // namespace sarmot
