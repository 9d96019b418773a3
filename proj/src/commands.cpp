#include "dryfric/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dryfric/csv.hpp"
#include "dryfric/error.hpp"
#include "dryfric/extrapolate.hpp"
#include "dryfric/kolmogorov.hpp"
#include "dryfric/mc_stats.hpp"
#include "dryfric/pdmp_sim.hpp"

namespace dryfric::commands {

namespace fs = std::filesystem;
namespace kol = kolmogorov;

namespace {

std::string prepare(const RunConfig& c, const std::string& name) {
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.output_dir + ": " + ec.message());
  return (fs::path(c.output_dir) / name).string();
}

Params with_delta(const RunConfig& c, double delta) {
  Params p = c.params;
  p.delta = delta;
  return p;
}

// Exact integer exponent e with x = 2^e, if any.
bool power_of_two(double x, int& e) {
  int exp2 = 0;
  const double m = std::frexp(x, &exp2);
  if (m != 0.5) return false;
  e = exp2 - 1;
  return true;
}

void write_histogram(const std::string& path, const std::string& hash, const stats::DurationHistogram& h) {
  csv::Writer w(path, hash, {"bin_lo", "bin_hi", "density"});
  const double width = h.width();
  for (std::size_t b = 0; b < h.bins(); ++b) {
    w.cell(h.lo + static_cast<double>(b) * width).cell(h.lo + static_cast<double>(b + 1) * width).cell(h.density[b]);
    w.end_row();
  }
}

kol::AssembleOptions assemble_options(const RunConfig& c) {
  kol::AssembleOptions o;
  o.memory_budget_bytes = c.memory_budget;
  return o;
}

const char* kStatNames[4] = {"S1_p_stick", "S2_v_squared", "S3_band", "S4_eta_squared"};

// Density at 0+ from a two-bin histogram on [0, 2h]; empty bins read as 0.
// The slide density really does vanish near 0, so empty bins are a valid
// answer there; an empty stick bin means the sample is too small.
stats::F0Estimate mc_f0(const std::vector<double>& samples, double h, bool allow_empty) {
  const auto hist = stats::make_histogram(samples, 2, 0.0, 2.0 * h);
  if (allow_empty && (hist.counts[0] == 0 || hist.counts[1] == 0))
    return {hist.density[0], 1.5 * hist.density[0] - 0.5 * hist.density[1]};
  return stats::f0_estimate(hist);
}

}  // namespace

CommandResult cmd_simulate(const RunConfig& c) {
  const Model model(c.params);
  const auto ex = sim::simulate_excursions(model, c.n_excursions, c.params.seed, c.threads);
  const auto table = stats::stationary_statistics(ex);
  const auto hists = stats::duration_histograms(ex, c.nbins);
  const std::string hash = c.hash();
  CommandResult r;

  {
    const std::string path = prepare(c, "stats.csv");
    csv::Writer w(path, hash, {"name", "value", "stderr", "lo95", "hi95", "n"});
    for (int s = 0; s < stats::kStatisticCount; ++s) {
      const auto& e = table[static_cast<std::size_t>(s)];
      w.cell(stats::statistic_name(static_cast<stats::Statistic>(s)))
          .cell(e.value).cell(e.stderr_).cell(e.lo95).cell(e.hi95).cell(static_cast<std::uint64_t>(e.n));
      w.end_row();
    }
    r.files.push_back(path);
  }
  const std::pair<const char*, const stats::DurationHistogram*> hs[] = {
      {"hist_stick.csv", &hists.stick}, {"hist_slide.csv", &hists.slide}, {"hist_excursion.csv", &hists.excursion}};
  for (const auto& [name, h] : hs) {
    const std::string path = prepare(c, name);
    write_histogram(path, hash, *h);
    r.files.push_back(path);
  }

  std::ostringstream os;
  os << "excursions: " << ex.size() << "\n";
  for (int s = 0; s < stats::kStatisticCount; ++s) {
    const auto& e = table[static_cast<std::size_t>(s)];
    os << stats::statistic_name(static_cast<stats::Statistic>(s)) << " = " << csv::number(e.value)
       << " +- " << csv::number(1.96 * e.stderr_) << "\n";
  }
  os << "tail mass (stick/slide/excursion): " << hists.stick.tail_mass << " / " << hists.slide.tail_mass
     << " / " << hists.excursion.tail_mass << "\n";
  r.summary = os.str();
  return r;
}

CommandResult cmd_solve(const RunConfig& c) {
  const std::string hash = c.hash();
  CommandResult r;
  const std::string stats_path = prepare(c, "solve.csv");
  const std::string report_path = prepare(c, "solve_report.csv");
  csv::Writer out(stats_path, hash, {"statistic", "delta", "p", "lambda", "value"});
  csv::Writer rep(report_path, hash,
                  {"delta", "p", "lambda", "nodes", "nnz", "factorizations", "solves", "residual"});
  std::map<std::string, extrapolate::StatGrid> grids;
  bool gridable = true;
  std::ostringstream os;

  for (double delta : c.delta_list()) {
    const Model model(with_delta(c, delta));
    for (int p : c.p) {
      const auto op = kol::assemble(model, p, assemble_options(c));
      for (std::size_t li = 0; li < c.lambda.size(); ++li) {
        const double lambda = c.lambda[li];
        const auto det = kol::stationary_statistics_det(op, lambda);
        for (int s = 0; s < 4; ++s) {
          out.cell(kStatNames[s]).cell(delta).cell(p).cell(lambda).cell(det.at_s_plus[static_cast<std::size_t>(s)]);
          out.end_row();
        }
        rep.cell(delta).cell(p).cell(lambda).cell(static_cast<std::uint64_t>(det.report.n))
            .cell(static_cast<std::uint64_t>(det.report.nnz)).cell(det.report.factorizations)
            .cell(det.report.solves).cell(det.report.residual);
        rep.end_row();
        os << "delta=" << delta << " p=" << p << " lambda=" << lambda << " nodes=" << det.nodes
           << ": S1=" << csv::number(det.at_s_plus[0]) << " S2=" << csv::number(det.at_s_plus[1])
           << " S3=" << csv::number(det.at_s_plus[2]) << " S4=" << csv::number(det.at_s_plus[3]) << "\n";
        int ek = 0, el = 0;
        if (li == 0 && power_of_two(p, ek) && power_of_two(delta, el)) {
          for (int s = 0; s < 4; ++s) grids[kStatNames[s]].set_computed(ek, -el, det.at_s_plus[static_cast<std::size_t>(s)]);
        } else if (li == 0) {
          gridable = false;
        }
      }
    }
  }
  r.files = {stats_path, report_path};
  if (gridable && !grids.empty()) {
    const std::string path = prepare(c, "stat_grid.csv");
    std::ofstream g(path);
    if (!g) throw IoError("cannot open " + path);
    g << "# config_hash=" << hash << " version=" << csv::version() << '\n';
    extrapolate::write_grids_csv(g, grids);
    r.files.push_back(path);
  }
  r.summary = os.str();
  return r;
}

CommandResult cmd_durations(const RunConfig& c) {
  const Model model(c.params);
  const int p = c.p.front();
  const auto op = kol::assemble(model, p, assemble_options(c));
  const auto mop = kol::modified_assemble(model, p, assemble_options(c));
  const double Lambda = model.jump_rate();
  const std::string hash = c.hash();
  CommandResult r;

  const kol::StickLaplace stick(op);
  std::vector<double> lams = c.laplace_lambdas;
  if (lams.empty()) lams = kol::geometric_grid(Lambda, -8, 8);
  {
    const std::string path = prepare(c, "laplace.csv");
    csv::Writer w(path, hash, {"lambda", "F_stick", "F_slid_G", "F_slid_w"});
    for (double l : lams) {
      const auto slid = kol::laplace_slid(op, mop, l);
      w.cell(l).cell(stick(l)).cell(slid.via_G).cell(slid.via_w);
      w.end_row();
    }
    r.files.push_back(path);
  }

  const auto grid = kol::geometric_grid(Lambda, c.f0_exp_lo, c.f0_exp_hi);
  const auto f0_stick = kol::f0_from_laplace(stick, grid);
  const auto f0_slide = kol::f0_from_laplace([&](double l) { return kol::laplace_slid_G(op, l); }, grid);

  double mc_stick_first = std::nan(""), mc_stick_two = std::nan("");
  double mc_slide_first = std::nan(""), mc_slide_two = std::nan("");
  if (c.durations_mc) {
    const auto ex = sim::simulate_excursions(model, c.n_excursions, c.params.seed, c.threads);
    std::vector<double> st, sl;
    st.reserve(ex.size());
    sl.reserve(ex.size());
    for (const auto& e : ex) {
      st.push_back(e.stick_time());
      sl.push_back(e.tau_hat1);
    }
    const double h = c.f0_bin_width / Lambda;
    const auto a = mc_f0(st, h, false), b = mc_f0(sl, h, true);
    mc_stick_first = a.first_bin;
    mc_stick_two = a.two_bin;
    mc_slide_first = b.first_bin;
    mc_slide_two = b.two_bin;
  }

  {
    const std::string path = prepare(c, "f0.csv");
    csv::Writer w(path, hash, {"phase", "kolmogorov", "kolmogorov_exact", "monotone_tail", "mc_first_bin", "mc_two_bin"});
    w.cell("stick").cell(f0_stick.value).cell(stick.density_at_zero()).cell(f0_stick.monotone_tail ? 1 : 0)
        .cell(mc_stick_first).cell(mc_stick_two);
    w.end_row();
    w.cell("slide").cell(f0_slide.value).cell(std::nan("")).cell(f0_slide.monotone_tail ? 1 : 0)
        .cell(mc_slide_first).cell(mc_slide_two);
    w.end_row();
    r.files.push_back(path);
  }

  std::ostringstream os;
  os << "f_stick(0+): kolmogorov " << csv::number(f0_stick.value) << " (exact on grid "
     << csv::number(stick.density_at_zero()) << "), MC " << csv::number(mc_stick_first) << "\n"
     << "f_slide(0+): kolmogorov " << csv::number(f0_slide.value) << ", MC " << csv::number(mc_slide_first) << "\n";
  if (!f0_stick.monotone_tail || !f0_slide.monotone_tail) os << "warning: non-monotone lambda F(lambda) tail\n";
  r.summary = os.str();
  return r;
}

CommandResult cmd_psd(const RunConfig& c) {
  const Model model(c.params);
  const auto op = kol::assemble(model, c.p.front(), assemble_options(c));
  const kol::Vec pi = kol::stationary_measure_grid(op);
  const auto omega = c.omega_grid();
  const auto S = kol::psd(op, pi, omega);

  std::vector<double> mc(omega.size(), std::nan(""));
  if (c.psd_mc) {
    Rng rng = make_stream(c.params.seed, 0);
    const auto v = sim::sample_velocity(model, c.psd_T, c.psd_dt, rng, model.s_plus());
    const auto seg = static_cast<std::size_t>(std::llround(c.psd_segment / c.psd_dt));
    mc = stats::welch_psd(v, c.psd_dt, seg, omega);
  }

  const std::string hash = c.hash();
  const std::string path = prepare(c, "psd.csv");
  csv::Writer w(path, hash, {"omega", "S_v", "even_gap", "nonnegative", "S_mc"});
  bool all_nonneg = true;
  double worst_gap = 0.0;
  for (std::size_t q = 0; q < omega.size(); ++q) {
    // evenness against the mirrored frequency when it is on the grid
    double gap = std::nan("");
    for (std::size_t m = 0; m < omega.size(); ++m)
      if (omega[m] == -omega[q]) gap = std::abs(S[q] - S[m]);
    const bool nonneg = S[q] >= -1e-8;
    all_nonneg = all_nonneg && nonneg;
    if (gap == gap) worst_gap = std::max(worst_gap, gap);
    w.cell(omega[q]).cell(S[q]).cell(gap).cell(nonneg ? 1 : 0).cell(mc[q]);
    w.end_row();
  }
  CommandResult r;
  r.files.push_back(path);
  std::ostringstream os;
  os << "omega points: " << omega.size() << ", nonnegative: " << (all_nonneg ? "yes" : "no")
     << ", max |S(w) - S(-w)|: " << worst_gap << "\n";
  r.summary = os.str();
  return r;
}

CommandResult cmd_extrapolate(const RunConfig& c) {
  if (c.grid_csv.empty()) throw ConfigError("extrapolate needs grid_csv");
  std::ifstream in(c.grid_csv);
  if (!in) throw ConfigError("cannot read grid CSV " + c.grid_csv);
  auto grids = extrapolate::read_grids_csv(in);
  const auto targets = c.target_cells();
  std::ostringstream os;
  for (auto& [name, g] : grids) {
    g = extrapolate::propagate(std::move(g), targets);
    for (const auto& [k, l] : targets)
      os << name << " (" << k << "," << l << ") = " << csv::number(g.value(k, l)) << " ["
         << extrapolate::provenance_name(g.provenance(k, l)) << "]\n";
  }
  const std::string path = prepare(c, "grid_filled.csv");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "# config_hash=" << c.hash() << " version=" << csv::version() << '\n';
  extrapolate::write_grids_csv(out, grids);
  if (!out) throw IoError("write failure on " + path);
  CommandResult r;
  r.files.push_back(path);
  r.summary = os.str();
  return r;
}

CommandResult cmd_kappa(const RunConfig& c) {
  const Model model(c.params);
  const auto kappas = kol::kappa_statistics(model, c.kappa_p, c.lambda.front(), assemble_options(c));

  const std::string hash = c.hash();
  const std::string path = prepare(c, "kappa.csv");
  csv::Writer w(path, hash, {"statistic", "delta", "p", "kappa"});
  std::ostringstream os;
  for (int s = 0; s < 4; ++s) {
    os << kStatNames[s] << ":";
    for (int p : c.kappa_p) {
      const double k = kappas.at(p)[static_cast<std::size_t>(s)];
      w.cell(kStatNames[s]).cell(c.params.delta).cell(p).cell(k);
      w.end_row();
      os << " kappa(" << p << ")=" << csv::number(k);
    }
    os << "\n";
  }
  CommandResult r;
  r.files.push_back(path);
  r.summary = os.str();
  return r;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"simulate", "solve", "durations", "psd", "extrapolate", "kappa"};
  return names;
}

CommandResult run(const std::string& name, const RunConfig& c) {
  if (name == "simulate") return cmd_simulate(c);
  if (name == "solve") return cmd_solve(c);
  if (name == "durations") return cmd_durations(c);
  if (name == "psd") return cmd_psd(c);
  if (name == "extrapolate") return cmd_extrapolate(c);
  if (name == "kappa") return cmd_kappa(c);
  throw InvalidArgument("unknown command '" + name + "'");
}

}  // namespace dryfric::commands
