#pragma once

#include "sarmot/core.hpp"

namespace sarmot {

struct ClearMot {
  double mota = 0.0;
  int fp = 0;
  int fn = 0;
  int idsw = 0;
  int mt = 0;
  int ml = 0;
  int gt_boxes = 0;
  int gt_tracks = 0;
};

struct IdMetrics {
  double idf1 = 0.0;
  double idp = 0.0;
  double idr = 0.0;
  int idtp = 0;
  int idfp = 0;
  int idfn = 0;
};

struct HotaMetrics {
  static constexpr int kAlphaCount = 19;  // 0.05, 0.10, ..., 0.95

  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
  double hota_alpha[kAlphaCount] = {};
  double deta_alpha[kAlphaCount] = {};
  double assa_alpha[kAlphaCount] = {};

  static double alpha(int k) { return 0.05 * (k + 1); }
};

struct MetricsReport {
  ClearMot clear;
  IdMetrics id;
  HotaMetrics hota;
};

/// CLEAR-MOT with the persistence rule: a GT/prediction pair kept from the
/// previous frame stays matched while its IoU is >= iou_thr. MT/ML use 80% /
/// 20% coverage. Throws DataError when GT is empty.
ClearMot clear_mot(const TrajectorySet& gt, const TrajectorySet& pred, double iou_thr = 0.5);

/// Identity metrics from the optimal one-to-one GT/prediction trajectory
/// pairing. Both sets empty -> all ones.
IdMetrics id_metrics(const TrajectorySet& gt, const TrajectorySet& pred, double iou_thr = 0.5);

/// HOTA family averaged over the 19-point alpha grid. Per alpha and frame the
/// matching maximizes the number of pairs with IoU >= alpha, then their IoU
/// sum. Throws DataError when GT is empty.
HotaMetrics hota(const TrajectorySet& gt, const TrajectorySet& pred);

MetricsReport evaluate(const TrajectorySet& gt, const TrajectorySet& pred, double iou_thr = 0.5);

}  // namespace sarmot
