#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "wpdiff/io.hpp"

namespace fs = std::filesystem;
using namespace wpdiff;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

unsigned resolve_threads(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("WPDIFF_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw ConfigError("WPDIFF_THREADS must be a positive integer");
  }
  return 1;
}

std::string stem_for(const ScenarioConfig& c, const std::string& fallback) {
  return c.preset_name ? *c.preset_name : fallback;
}

void require_mode(const ScenarioConfig& c, std::initializer_list<Mode> allowed, const char* cmd) {
  for (Mode m : allowed)
    if (c.mode == m) return;
  throw ConfigError(std::string(cmd) + " does not run mode " + std::string(to_string(c.mode)));
}

// key=v1,v2,... -> key, values
std::pair<std::string, std::vector<std::string>> parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=v1,v2,...: '" + spec + "'");
  auto values = io::detail::split(std::string_view(spec).substr(eq + 1), ',');
  for (const auto& v : values)
    if (v.empty()) throw ConfigError("--set " + spec + ": empty value");
  return {io::detail::trim(std::string_view(spec).substr(0, eq)), values};
}

void run_sweep(const std::string& config_path, const std::vector<std::string>& axes_spec, const fs::path& out,
               unsigned threads, int nk) {
  const auto base = io::parse_config_document(io::read_file(config_path));
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& s : axes_spec) axes.push_back(parse_axis(s));
  if (axes.empty()) throw ConfigError("sweep needs at least one --set key=v1,v2,...");

  // Cartesian product, last axis fastest. All points are parsed before any run.
  std::vector<ScenarioConfig> points;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    io::ConfigDocument doc = base;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& [key, values] = axes[a];
      bool replaced = false;
      for (auto& [k, v] : doc.entries)
        if (k == key) {
          v = values[idx[a]];
          replaced = true;
        }
      if (!replaced) doc.entries.emplace_back(key, values[idx[a]]);
    }
    points.push_back(io::config_from_document(doc));
    std::size_t a = axes.size();
    while (a > 0 && ++idx[a - 1] == axes[a - 1].second.size()) idx[--a] = 0;
    if (a == 0) break;
  }

  std::vector<RunRecord> records(points.size());
  std::exception_ptr failure;
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (failure || next == points.size()) return;
        i = next++;
      }
      try {
        records[i] = run_scenario(points[i], {1, nk});
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, points.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::string index = "hash,config\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string hash = io::config_hash(points[i]);
    const fs::path dir = out / hash;
    io::write_record(records[i], dir, "run");
    io::write_text_file(dir / "config.cfg", io::serialize_config(points[i]));
    std::string summary;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& key = axes[a].first;
      for (const auto& [k, v] : io::parse_config_document(io::serialize_config(points[i])).entries)
        if (k == key) summary += (summary.empty() ? "" : " ") + k + "=" + v;
    }
    index += hash + "," + summary + "\n";
  }
  io::write_text_file(out / "sweep_index.csv", index);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave packet diffraction: time evolution, asymptotics and figure presets"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", preset_flag;
  int threads_flag = 0, nk = 64;
  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "config file")->check(CLI::ExistingFile);
    if (needs_config) opt->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads_flag, "worker threads (default: WPDIFF_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--nk", nk, "quadrature nodes per panel")->check(CLI::PositiveNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "evolve a packet with the Schroedinger or Dirac solver");
  common(simulate, true);
  auto* analytic = app.add_subcommand("analytic", "long-time 1D pattern or 3D field map on a grid");
  common(analytic, true);
  auto* preset = app.add_subcommand("preset", "run a figure preset");
  common(preset, false);
  std::string preset_name;
  preset->add_option("name", preset_name, "fig1, fig4 ... fig10");
  preset->add_option("--preset", preset_flag, "preset name");
  auto* experiment = app.add_subcommand("experiment", "helium drop against a plate (laboratory units)");
  common(experiment, false);
  auto* compare = app.add_subcommand("compare", "compare two profile CSV files");
  std::vector<std::string> compare_files;
  compare->add_option("files", compare_files, "two profile CSV files")->expected(2)->required()->check(CLI::ExistingFile);
  compare->add_option("--out", out_dir, "output directory");
  auto* sweep = app.add_subcommand("sweep", "cartesian product over parameter values");
  common(sweep, true);
  std::vector<std::string> axes;
  sweep->add_option("--set", axes, "key=v1,v2,... (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const unsigned threads = resolve_threads(threads_flag);
    const RunOptions opts{threads, nk};
    const fs::path out(out_dir);

    if (*simulate || *analytic) {
      auto c = io::load_config(config_path);
      if (*simulate) require_mode(c, {Mode::schrodinger1d, Mode::dirac1d}, "simulate");
      if (*analytic) require_mode(c, {Mode::analytic1d, Mode::analytic3d}, "analytic");
      const auto r = run_scenario(c, opts);
      io::write_record(r, out, stem_for(c, *simulate ? "simulate" : "analytic"));
    } else if (*preset) {
      if (!preset_name.empty() && !preset_flag.empty() && preset_name != preset_flag) {
        throw ConfigError("preset given twice with different names");
      }
      const std::string name = preset_name.empty() ? preset_flag : preset_name;
      if (name.empty()) throw ConfigError("preset needs a name");
      auto c = preset_config(name);
      const auto r = run_scenario(c, opts);
      io::write_record(r, out, name);
    } else if (*experiment) {
      auto c = config_path.empty() ? helium_config() : io::load_config(config_path);
      require_mode(c, {Mode::experiment}, "experiment");
      const auto r = run_scenario(c, opts);
      io::write_record(r, out, stem_for(c, "experiment"));
    } else if (*compare) {
      const auto a = io::read_profile_csv(compare_files[0]);
      const auto b = io::read_profile_csv(compare_files[1]);
      if (a.x != b.x) throw ConfigError("compare: the profiles are not on the same grid");
      if (a.x.size() < 2) throw ConfigError("compare: profiles need at least two samples");
      const auto m = compare_profiles(a.abs_upper(), b.abs_upper(), a.x[1] - a.x[0], a.x[0]);
      std::string text = "a=" + compare_files[0] + "\nb=" + compare_files[1] + "\n";
      io::append_comparison(text, m);
      std::cout << text;
      if (compare->count("--out")) {
        fs::create_directories(out);
        io::write_text_file(out / "compare_report.txt", text);
      }
    } else if (*sweep) {
      run_sweep(config_path, axes, out, threads, nk);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
