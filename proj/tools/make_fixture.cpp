// Writes the desk-scale grid fixture: network, demand profiles, depots,
// background volumes and a ready-to-run scenario config.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace fs = std::filesystem;

namespace {

struct Params {
  std::string out = "fixtures";
  int grid = 10;            // grid side, nodes
  double spacing_m = 700;   // link length
  double ffs_mps = 10;      // 36 km/h urban
  double cap_vph = 600;
  double alpha = 0.15, beta = 4;
  // Oversaturated background (v/c 1.4 base, 1.9 peak): the desk grid is far
  // denser in demand than a real city, so heavy ambient congestion is what
  // keeps insertion reach, and with it ride-sharing coverage, city-like.
  double bg_base_vph = 840;
  double bg_peak_vph = 1140;
};

int node_id(const Params& p, int r, int c) { return r * p.grid + c + 1; }

void write_network(const Params& p) {
  std::ofstream nodes(fs::path(p.out) / "nodes.csv");
  nodes << "# id,x,y\n";
  for (int r = 0; r < p.grid; ++r)
    for (int c = 0; c < p.grid; ++c)
      nodes << node_id(p, r, c) << "," << c * p.spacing_m << "," << r * p.spacing_m << "\n";

  std::ofstream links(fs::path(p.out) / "links.csv");
  links << "# id,from,to,length_m,ffs_mps,cap_vph,alpha,beta\n";
  int id = 1;
  char buf[160];
  auto emit = [&](int a, int b) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%g,%g,%g,%g,%g\n", id++, a, b, p.spacing_m,
                  p.ffs_mps, p.cap_vph, p.alpha, p.beta);
    links << buf;
  };
  for (int r = 0; r < p.grid; ++r)
    for (int c = 0; c < p.grid; ++c) {
      if (c + 1 < p.grid) {
        emit(node_id(p, r, c), node_id(p, r, c + 1));
        emit(node_id(p, r, c + 1), node_id(p, r, c));
      }
      if (r + 1 < p.grid) {
        emit(node_id(p, r, c), node_id(p, r + 1, c));
        emit(node_id(p, r + 1, c), node_id(p, r, c));
      }
    }
}

void write_profiles(const Params& p) {
  // Bimodal passenger day: strong morning and evening commute shoulders.
  const double pax[24] = {0.2, 0.1, 0.1, 0.1, 0.3, 1.0, 3.0, 7.5, 9.0, 6.5,
                          5.0, 5.0, 5.0, 5.0, 5.0, 5.5, 6.0, 8.5, 9.5, 7.0,
                          4.5, 2.5, 1.5, 0.7};
  // Parcels cluster in business hours with a midday plateau.
  const double par[24] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 3.0, 5.0, 7.0,
                          9.0, 10.0, 10.0, 9.5, 9.0, 8.5, 7.0, 6.0, 5.0, 4.0,
                          3.0, 2.0, 0.0, 0.0};
  std::ofstream pf(fs::path(p.out) / "passenger_profile.csv");
  pf << "# hour,weight\n";
  for (int h = 0; h < 24; ++h) pf << h << "," << pax[h] << "\n";
  std::ofstream qf(fs::path(p.out) / "parcel_profile.csv");
  qf << "# hour,weight\n";
  for (int h = 0; h < 24; ++h) qf << h << "," << par[h] << "\n";
}

void write_parcel_spatial(const Params& p) {
  // parcels cluster on a central retail block: short hauls, B2C-style
  std::ofstream out(fs::path(p.out) / "parcel_spatial.csv");
  out << "# node,weight\n";
  for (int r = 0; r < p.grid; ++r)
    for (int c = 0; c < p.grid; ++c) {
      bool central = r >= 3 && r <= 6 && c >= 3 && c <= 6;
      out << node_id(p, r, c) << "," << (central ? 1.0 : 0.05) << "\n";
    }
}

void write_depots(const Params& p) {
  std::ofstream out(fs::path(p.out) / "depots.csv");
  out << "id,node,vehicles,capacity\n";
  // opposite corners so nearest-depot assignment splits the grid
  out << "1," << node_id(p, 0, 0) << ",8,20\n";
  out << "2," << node_id(p, p.grid - 1, p.grid - 1) << ",8,20\n";
}

void write_background(const Params& p) {
  std::ofstream out(fs::path(p.out) / "background.csv");
  out << "# link_id,bin,volume_vph\n";
  int n_links = 2 * 2 * p.grid * (p.grid - 1);
  // base flow all day, then heavier commute-window bins (900 s bins)
  for (int id = 1; id <= n_links; ++id) out << id << ",-1," << p.bg_base_vph << "\n";
  auto peak = [&](int b0, int b1) {
    for (int id = 1; id <= n_links; ++id)
      for (int b = b0; b < b1; ++b) out << id << "," << b << "," << p.bg_peak_vph << "\n";
  };
  peak(28, 40);  // 07:00-10:00
  peak(64, 84);  // 16:00-21:00
}

void write_conf(const Params& p) {
  std::ofstream out(fs::path(p.out) / "desk.conf");
  out << "# desk-scale scenario: " << p.grid << "x" << p.grid << " grid\n"
      << "nodes=" << p.out << "/nodes.csv\n"
      << "links=" << p.out << "/links.csv\n"
      << "passenger_profile=" << p.out << "/passenger_profile.csv\n"
      << "parcel_profile=" << p.out << "/parcel_profile.csv\n"
      << "passenger_total=5000\n"
      << "parcel_total=600\n"
      << "shared_fraction=0.27\n"
      << "demand_seed=12345\n"
      << "parcel_spatial_weights=" << p.out << "/parcel_spatial.csv\n"
      << "depots=" << p.out << "/depots.csv\n"
      << "background=" << p.out << "/background.csv\n"
      << "multi_parcel=false\n"
      << "dwell_s=60\n"
      << "parcel_approach_wait_s=180\n"
      << "strategy=BASE\n"
      << "fleet_size=100\n"
      << "seeds=1,2,3\n"
      << "iterations=3\n"
      << "out_dir=out/desk\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk fixture generator"};
  Params p;
  app.add_option("--out", p.out, "output directory");
  app.add_option("--grid", p.grid, "grid side length in nodes");
  app.add_option("--bg-base", p.bg_base_vph, "off-peak background vph");
  app.add_option("--bg-peak", p.bg_peak_vph, "peak background vph");
  CLI11_PARSE(app, argc, argv);
  try {
    fs::create_directories(p.out);
    write_network(p);
    write_profiles(p);
    write_parcel_spatial(p);
    write_depots(p);
    write_background(p);
    write_conf(p);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "fixture written to " << p.out << "\n";
  return 0;
}
