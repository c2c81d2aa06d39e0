#pragma once

#include <map>
#include <string>
#include <vector>

#include "hitchsim/freight.hpp"
#include "hitchsim/log.hpp"
#include "hitchsim/network.hpp"

namespace hitchsim {

// One row of the 5-minute status / fulfilment time series.
struct StatusSample {
  double t;
  int idle, cruising, serving, parking;
};

struct FulfilmentSample {
  double t;
  int pending_passenger, pending_parcel;
  int served_passenger, served_parcel;  // cumulative
};

// All Tables 1-4 figures as a flat name->value map (absent key = metric not
// defined for the run, e.g. a mean over an empty period), plus the Figures
// 6-7 series. Every value is recomputable from the logs alone.
struct MetricsReport {
  std::map<std::string, double> scalars;
  std::vector<StatusSample> status_series;
  std::vector<FulfilmentSample> fulfilment_series;
};

MetricsReport compute_metrics(const Network& net, const RunLog& log,
                              const StrategyConfig& cfg, int fleet_size);

// Carrier side (Table 2): offloaded tours for this run plus the all-parcel
// baseline for reference.
void add_carrier_metrics(MetricsReport& report, const std::vector<CarrierTour>& offloaded,
                         const std::vector<CarrierTour>& baseline);

// Arithmetic mean of every scalar across reports (keys averaged over the
// reports that carry them). Reports are combined in a fixed order so the
// result is independent of input permutation.
MetricsReport average_reports(std::vector<std::pair<std::uint64_t, MetricsReport>> by_seed);

void write_metrics_json(const std::string& path, const MetricsReport& r);
void write_tables_csv(const std::string& dir, const MetricsReport& r);
void write_series_csv(const std::string& dir, const MetricsReport& r);

}  // namespace hitchsim
