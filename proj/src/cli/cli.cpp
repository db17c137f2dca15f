// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#include "biotrunc/cli.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "biotrunc/eval.hpp"
#include "biotrunc/he.hpp"
#include "biotrunc/io.hpp"
#include "biotrunc/match.hpp"
#include "biotrunc/parallel.hpp"
#include "biotrunc/reduce.hpp"
#include "biotrunc/synth.hpp"

namespace biotrunc::cli {

namespace {

using io::Json;
namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string threads = "1";
  std::string format = "csv";

  unsigned thread_count() const {
    if (threads == "auto") return resolve_threads(0);
    try {
      std::size_t pos = 0;
      const unsigned long n = std::stoul(threads, &pos);
      if (pos == threads.size() && n >= 1 && n <= 1024) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    fail(ErrorCode::kInvalidArgument, "--threads must be a positive integer or 'auto'");
  }

  Json to_json() const {
    return {{"seed", seed}, {"out", out}, {"threads", thread_count()}, {"format", format}};
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::size_t parse_size(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos == s.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kInvalidArgument, what + ": '" + s + "' is not a non-negative integer");
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kInvalidArgument, what + ": '" + s + "' is not a number");
}

void log_config(std::ostream& err, const std::string& command, const Json& config) {
  err << "biotrunc " << command << " config: " << config.dump() << "\n";
}

fs::path out_dir(const Globals& g) {
  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorCode::kIo, "cannot create output directory " + dir.string());
  return dir;
}

void check_format(const Globals& g) {
  require(g.format == "csv" || g.format == "json", ErrorCode::kInvalidArgument, "--format must be csv or json");
}

// --plan accepts a file path or inline JSON.
reduce::ReductionPlan load_plan(const std::string& arg) {
  const std::string text = !arg.empty() && arg.front() == '{' ? arg : io::read_text(arg);
  return io::plan_from_json(io::parse_json(text, "plan"));
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::size_t subjects = 200;
  std::size_t samples = 4;
  std::size_t dim = 512;
  std::size_t rank = 6;
  std::vector<std::string> sigma;
  std::vector<std::string> degradation;
  std::string calibrate;
  std::string config;
};

// "0.05" for every modality, or "face=0.05,iris=0.07".
void apply_per_modality(synth::SynthConfig& c, const std::vector<std::string>& items, bool sigma) {
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      const double v = parse_double(item, sigma ? "--sigma" : "--degradation");
      for (auto& m : c.modalities) (sigma ? m.sigma : m.degradation) = v;
      continue;
    }
    const std::string name = item.substr(0, eq);
    const double v = parse_double(item.substr(eq + 1), sigma ? "--sigma" : "--degradation");
    auto it = std::find_if(c.modalities.begin(), c.modalities.end(),
                           [&](const synth::ModalityNoise& m) { return m.modality.name() == name; });
    require(it != c.modalities.end(), ErrorCode::kInvalidArgument, "unknown modality '" + name + "'");
    (sigma ? it->sigma : it->degradation) = v;
  }
}

int cmd_synth(const Globals& g, const SynthArgs& a, std::ostream& out, std::ostream& err) {
  synth::SynthConfig c = synth::SynthConfig::desk_default();
  if (!a.config.empty()) c = io::synth_config_from_json(io::parse_json(io::read_text(a.config), a.config));
  c.subjects = a.subjects;
  c.samples_per_modality = a.samples;
  c.dim = a.dim;
  c.latent_rank = a.rank;
  c.seed = g.seed;
  apply_per_modality(c, a.sigma, true);
  apply_per_modality(c, a.degradation, false);
  c.validate();

  Json calibration = nullptr;
  if (!a.calibrate.empty()) {
    const auto parts = split(a.calibrate, ',');
    require(parts.size() == 2, ErrorCode::kInvalidArgument, "--calibrate expects lo,hi");
    const auto result = synth::calibrate({parse_double(parts[0], "--calibrate"), parse_double(parts[1], "--calibrate")}, c);
    calibration = Json::array();
    for (std::size_t m = 0; m < result.size(); ++m) {
      c.modalities[m].sigma = result[m].sigma;
      calibration.push_back({{"modality", result[m].modality.name()}, {"sigma", result[m].sigma}, {"eer", result[m].eer}});
    }
  }
  Json config = g.to_json();
  config["synth"] = io::synth_config_to_json(c);
  log_config(err, "synth", config);

  const fs::path dir = out_dir(g);
  const MultiDataset ds = synth::generate(c, g.thread_count());
  Json files = Json::array();
  for (std::size_t m = 0; m < ds.modalities().size(); ++m) {
    std::vector<Template> templates;
    for (const auto& s : ds.subjects()) templates.insert(templates.end(), s.samples[m].begin(), s.samples[m].end());
    const std::string name = ds.modalities()[m].name() + ".btrc";
    io::write_templates(dir / name, templates);
    files.push_back({{"modality", ds.modalities()[m].name()}, {"path", name}, {"templates", templates.size()}});
  }
  Json manifest = {{"config", io::synth_config_to_json(c)}, {"files", files}};
  if (!calibration.is_null()) manifest["calibration"] = calibration;
  io::write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << files.size() << " template files and manifest.json to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// reduce

// Groups per-modality records by (subject, sample) for fusion.
std::vector<std::vector<Template>> group_for_fusion(const std::vector<std::vector<Template>>& files) {
  std::map<std::pair<std::string, std::uint32_t>, std::vector<Template>> groups;
  std::vector<std::pair<std::string, std::uint32_t>> order;
  for (const auto& file : files) {
    for (const auto& t : file) {
      const auto key = std::make_pair(t.subject_id, t.sample_index);
      auto [it, inserted] = groups.try_emplace(key);
      if (inserted) order.push_back(key);
      it->second.push_back(t);
    }
  }
  std::vector<std::vector<Template>> out;
  for (const auto& key : order) {
    require(groups[key].size() == files.size(), ErrorCode::kInvalidArgument,
            "subject " + key.first + " sample " + std::to_string(key.second) + " is missing in some input");
    out.push_back(std::move(groups[key]));
  }
  return out;
}

int cmd_reduce(const Globals& g, const std::string& plan_arg, const std::vector<std::string>& inputs,
               std::ostream& out, std::ostream& err) {
  const reduce::ReductionPlan plan = load_plan(plan_arg);
  Json config = g.to_json();
  config["plan"] = io::plan_to_json(plan);
  config["inputs"] = inputs;
  log_config(err, "reduce", config);
  require(!inputs.empty(), ErrorCode::kInvalidArgument, "reduce needs at least one input file");
  const fs::path dir = out_dir(g);

  std::vector<std::vector<Template>> files;
  for (const auto& in : inputs) files.push_back(io::read_templates(in));

  if (std::holds_alternative<reduce::ConcatFusion>(plan.fusion)) {
    std::vector<Template> fused;
    for (const auto& group : group_for_fusion(files)) fused.push_back(reduce::apply_plan_fused(group, plan));
    const fs::path path = dir / "fused.btrc";
    io::write_templates(path, fused);
    out << "wrote " << fused.size() << " fused templates to " << path.string() << "\n";
    return kExitOk;
  }
  for (std::size_t f = 0; f < files.size(); ++f) {
    std::vector<Template> reduced;
    reduced.reserve(files[f].size());
    for (const auto& t : files[f]) reduced.push_back(reduce::apply_plan(t, plan));
    const fs::path path = dir / (fs::path(inputs[f]).stem().string() + ".reduced.btrc");
    io::write_templates(path, reduced);
    out << "wrote " << reduced.size() << " templates to " << path.string() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// enroll / match

struct EnrollArgs {
  std::string pubkey;
  std::size_t bits = he::kDefaultKeyBits;
  bool squares = false;
  bool deterministic = false;
  std::vector<std::string> inputs;
};

int cmd_enroll(const Globals& g, const EnrollArgs& a, std::ostream& out, std::ostream& err) {
  Json config = g.to_json();
  config["pubkey"] = a.pubkey;
  config["bits"] = a.bits;
  config["squares"] = a.squares;
  config["deterministic"] = a.deterministic;
  config["inputs"] = a.inputs;
  log_config(err, "enroll", config);
  require(!a.inputs.empty(), ErrorCode::kInvalidArgument, "enroll needs at least one template file");
  const fs::path dir = out_dir(g);

  std::optional<he::PublicKey> pk;
  if (!a.pubkey.empty()) {
    pk = io::public_key_from_json(io::parse_json(io::read_text(a.pubkey), a.pubkey));
  } else {
    const he::KeyPair key = he::keygen(a.bits, g.seed);
    io::write_text_atomic(dir / "key.json", io::key_pair_to_json(key).dump(2) + "\n");
    io::write_text_atomic(dir / "pubkey.json", io::public_key_to_json(key.pub).dump(2) + "\n");
    pk = key.pub;
    out << "generated a " << key.pub.bits() << "-bit key: " << (dir / "key.json").string() << "\n";
  }

  std::vector<Template> templates;
  for (const auto& in : a.inputs) {
    auto t = io::read_templates(in);
    templates.insert(templates.end(), t.begin(), t.end());
  }
  he::NonceSource nonce = a.deterministic ? he::NonceSource::deterministic(g.seed) : he::NonceSource::system();
  std::vector<he::EncryptedTemplate> gallery(templates.size());
  parallel_for(templates.size(), g.thread_count(), [&](std::size_t i) {
    he::NonceSource local = nonce.fork(i);
    gallery[i] = he::enroll_encrypted(*pk, templates[i].payload, local, a.squares);
    gallery[i].subject_id = templates[i].subject_id;
    gallery[i].sample_index = templates[i].sample_index;
  });
  const fs::path path = dir / "gallery.btre";
  io::write_gallery(path, gallery, *pk);
  out << "enrolled " << gallery.size() << " templates into " << path.string() << "\n";
  return kExitOk;
}

// "all", "fraction:k:i", "interleave:x" or "head:n".
std::optional<std::vector<std::size_t>> parse_selection(const std::string& spec, std::size_t dim) {
  if (spec.empty() || spec == "all") return std::nullopt;
  const auto parts = split(spec, ':');
  reduce::Truncation t;
  if (parts[0] == "fraction" && parts.size() == 3) {
    t = reduce::FractionTruncation{parse_size(parts[1], "--selection"), parse_size(parts[2], "--selection")};
  } else if (parts[0] == "interleave" && parts.size() == 2) {
    t = reduce::InterleaveTruncation{parse_size(parts[1], "--selection"), false};
  } else if (parts[0] == "head" && parts.size() == 2) {
    t = reduce::HeadTruncation{parse_size(parts[1], "--selection")};
  } else {
    fail(ErrorCode::kInvalidArgument,
         "--selection must be all, fraction:k:i, interleave:x or head:n (got '" + spec + "')");
  }
  return reduce::selection_of(t, dim);
}

struct MatchArgs {
  std::string gallery;
  std::string probe_file;
  std::string key;
  std::string selection = "all";
};

int cmd_match(const Globals& g, const MatchArgs& a, std::ostream& out, std::ostream& err) {
  check_format(g);
  Json config = g.to_json();
  config["gallery"] = a.gallery;
  config["probe_file"] = a.probe_file;
  config["key"] = a.key;
  config["selection"] = a.selection;
  log_config(err, "match", config);

  const he::KeyPair key = io::key_pair_from_json(io::parse_json(io::read_text(a.key), a.key));
  const auto gallery = io::read_gallery(a.gallery, key.pub);
  const auto probes = io::read_templates(a.probe_file);
  const fs::path dir = out_dir(g);
  require(!gallery.empty(), ErrorCode::kInvalidArgument, "gallery is empty");
  const auto selection = parse_selection(a.selection, gallery.front().dim);

  struct Row {
    std::size_t probe, reference;
    std::uint64_t score;
  };
  std::vector<Row> rows(probes.size() * gallery.size());
  parallel_for(rows.size(), g.thread_count(), [&](std::size_t i) {
    const std::size_t p = i / gallery.size(), r = i % gallery.size();
    const auto c = selection ? he::encrypted_sed(key.pub, probes[p].payload, gallery[r],
                                                 std::span<const std::size_t>(*selection))
                             : he::encrypted_sed(key.pub, probes[p].payload, gallery[r]);
    rows[i] = {p, r, he::decrypt_sed(key, c)};
  });

  if (g.format == "json") {
    Json j = Json::array();
    for (const auto& r : rows) {
      j.push_back({{"probe_subject", probes[r.probe].subject_id},
                   {"probe_sample", probes[r.probe].sample_index},
                   {"reference_subject", gallery[r.reference].subject_id},
                   {"reference_sample", gallery[r.reference].sample_index},
                   {"score", r.score}});
    }
    io::write_text_atomic(dir / "scores.json", j.dump(2) + "\n");
  } else {
    std::string csv = "probe_subject,probe_sample,reference_subject,reference_sample,score\n";
    for (const auto& r : rows) {
      csv += io::csv_field(probes[r.probe].subject_id) + "," + std::to_string(probes[r.probe].sample_index) + "," +
             io::csv_field(gallery[r.reference].subject_id) + "," +
             std::to_string(gallery[r.reference].sample_index) + "," + std::to_string(r.score) + "\n";
    }
    io::write_text_atomic(dir / "scores.csv", csv);
  }
  out << "scored " << rows.size() << " comparisons into " << (dir / ("scores." + g.format)).string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

// "<method>-<quantization>": fractions-binary, interleave-float, sum-q16, ...
eval::PlanFamily parse_family(const std::string& name) {
  const auto dash = name.find('-');
  require(dash != std::string::npos, ErrorCode::kInvalidArgument,
          "--plan '" + name + "' must look like <fractions|interleave|sum>-<float|binary|qN>");
  eval::PlanFamily f;
  f.method = eval::parse_method(name.substr(0, dash));
  const std::string q = name.substr(dash + 1);
  if (q == "float" || q == "none") {
    f.quantization = reduce::NoQuantization{};
  } else if (q == "binary") {
    f.quantization = reduce::BinaryQuantization{0.0};
  } else if (q == "int8") {
    f.quantization = reduce::LevelQuantization{256, {}, reduce::Rounding::kFloor};
  } else if (q.size() > 1 && q[0] == 'q') {
    f.quantization =
        reduce::LevelQuantization{static_cast<std::uint32_t>(parse_size(q.substr(1), "--plan")), {}, reduce::Rounding::kFloor};
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown quantization '" + q + "' in --plan (float, binary, qN, int8)");
  }
  reduce::ReductionPlan{f.quantization, {}, {}}.validate();
  return f;
}

// "interleave/levels(16,-1,1)" -> "interleave_levels_16_1_1".
std::string file_slug(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += c;
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

struct EvalArgs {
  std::vector<std::string> plans{"fractions-float"};
  std::string grid = "16,32,64,128,256,512";
  std::string seeds;
  std::string backend = "plaintext";
  std::string config;
  std::size_t subjects = 200;
  std::size_t samples = 4;
  std::size_t bits = he::kDefaultKeyBits;
  bool total_dim = false;
  bool det = false;
};

int cmd_eval(const Globals& g, const EvalArgs& a, std::ostream& out, std::ostream& err) {
  check_format(g);
  eval::ExperimentSpec spec;
  if (!a.config.empty()) spec.data = io::synth_config_from_json(io::parse_json(io::read_text(a.config), a.config));
  spec.data.subjects = a.subjects;
  spec.data.samples_per_modality = a.samples;
  for (const auto& p : a.plans) {
    for (const auto& name : split(p, ',')) spec.families.push_back(parse_family(name));
  }
  spec.grid.clear();
  for (const auto& d : split(a.grid, ',')) spec.grid.push_back(parse_size(d, "--grid"));
  spec.total_dim = a.total_dim;
  spec.scoring.backend = eval::parse_backend(a.backend);
  spec.scoring.threads = g.thread_count();
  spec.scoring.key_bits = a.bits;
  spec.scoring.key_seed = g.seed;
  spec.scoring.nonce_seed = g.seed;
  std::vector<std::uint64_t> seeds;
  if (a.seeds.empty()) {
    seeds.push_back(g.seed);
  } else {
    for (const auto& s : split(a.seeds, ',')) seeds.push_back(parse_size(s, "--seeds"));
  }
  spec.validate();

  Json config = g.to_json();
  Json fams = Json::array();
  for (const auto& f : spec.families) fams.push_back(f.name());
  config["families"] = fams;
  config["grid"] = spec.grid;
  config["seeds"] = seeds;
  config["backend"] = a.backend;
  config["total_dim"] = a.total_dim;
  config["synth"] = io::synth_config_to_json(spec.data);
  log_config(err, "eval", config);

  const fs::path dir = out_dir(g);
  int status = kExitOk;
  for (std::uint64_t seed : seeds) {
    spec.data.seed = seed;
    const MultiDataset ds = synth::generate(spec.data, spec.scoring.threads);
    for (const auto& table : eval::run_experiment(spec, ds)) {
      const std::string base = "eval_" + file_slug(table.title) + "_seed" + std::to_string(seed);
      if (g.format == "json") {
        io::write_text_atomic(dir / (base + ".json"), io::report_to_json(table).dump(2) + "\n");
      } else {
        io::write_csv(dir / (base + ".csv"), table);
      }
      out << "# " << table.title << " (seed " << seed << ")\n" << io::report_csv(table);
      if (table.partial) {
        err << "error: " << table.error << "\n";
        status = kExitUsage;
      }
    }
    if (a.det) {
      const auto pairs = synth::enumerate_comparisons(ds);
      std::vector<std::pair<std::string, eval::DetCurve>> curves;
      eval::Recipe fused;
      for (const auto& m : ds.modalities()) {
        eval::Recipe r;
        r.parts.push_back({m, {}});
        fused.parts.push_back({m, {}});
        curves.emplace_back(m.name(), eval::det_curve(eval::collect_scores(ds, r, pairs, spec.scoring)));
      }
      if (ds.modalities().size() > 1) {
        curves.emplace_back("fused", eval::det_curve(eval::collect_scores(ds, fused, pairs, spec.scoring)));
      }
      for (const auto& [name, curve] : curves) {
        io::write_csv(dir / ("det_" + file_slug(name) + "_seed" + std::to_string(seed) + ".csv"), curve);
      }
      io::write_text_atomic(dir / ("det_seed" + std::to_string(seed) + ".svg"), eval::det_svg(curves));
    }
    if (status != kExitOk) break;
  }
  return status;
}

// ---------------------------------------------------------------------------
// workload

int cmd_workload(const Globals& g, const std::string& dims, std::size_t slots, const std::string& kind,
                 std::ostream& out, std::ostream& err) {
  check_format(g);
  std::vector<he::WorkloadReport> reports;
  const he::PackedKind k = he::parse_packed_kind(kind);
  for (const auto& d : split(dims, ',')) reports.push_back(he::workload_estimate(parse_size(d, "--dim"), k, slots));
  Json config = g.to_json();
  config["dims"] = dims;
  config["slots"] = slots;
  config["kind"] = kind;
  log_config(err, "workload", config);

  const auto binary = he::workload_estimate(512, he::PackedKind::kBinary, slots);
  const auto fused_float = he::workload_estimate(1536, he::PackedKind::kFloat, slots);
  Json j = Json::object();
  Json list = Json::array();
  for (const auto& r : reports) list.push_back(io::workload_to_json(r));
  j["reports"] = list;
  j["reference"] = {
      {"binary_512", io::workload_to_json(binary)},
      {"float_1536", io::workload_to_json(fused_float)},
      {"operation_ratio_float_1536_over_binary_512", he::operation_ratio(fused_float, binary)},
      {"note",
       "operation counts under the rotate-and-sum model; element-type arithmetic cost is not modeled, so this is "
       "not a wall-clock speedup; the ~442x figure is a wall-clock timing claim and is not reproduced here"}};

  const fs::path dir = out_dir(g);
  if (g.format == "csv") {
    const std::string csv = io::workload_csv(reports);
    io::write_text_atomic(dir / "workload.csv", csv);
    out << csv;
  } else {
    io::write_text_atomic(dir / "workload.json", j.dump(2) + "\n");
    out << j.dump(2) << "\n";
  }
  return kExitOk;
}

}  // namespace

ExitCode exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kKeyMismatch:
    case ErrorCode::kCrypto:
      return kExitCrypto;
    case ErrorCode::kIo:
    case ErrorCode::kNotTemplateFile:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kTruncatedFile:
    case ErrorCode::kCountMismatch:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Training-free template reduction, encrypted matching and evaluation", "biotrunc"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Run seed (u64)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads: n or auto");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  std::function<int()> action;

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic multi-modal dataset");
  synth_cmd->add_option("--subjects", sa.subjects, "Virtual subjects")->capture_default_str();
  synth_cmd->add_option("--samples", sa.samples, "Samples per modality")->capture_default_str();
  synth_cmd->add_option("--dim", sa.dim, "Embedding dimension")->capture_default_str();
  synth_cmd->add_option("--rank", sa.rank, "Latent identity rank (0 = isotropic means)")->capture_default_str();
  synth_cmd->add_option("--sigma", sa.sigma, "Noise: v, or modality=v list")->delimiter(',');
  synth_cmd->add_option("--degradation", sa.degradation, "Extra noise: v, or modality=v list")->delimiter(',');
  synth_cmd->add_option("--calibrate", sa.calibrate, "Calibrate sigma to an EER range lo,hi");
  synth_cmd->add_option("--config", sa.config, "Base SynthConfig JSON");
  synth_cmd->callback([&] { action = [&] { return cmd_synth(g, sa, out, err); }; });

  std::string plan_arg;
  std::vector<std::string> reduce_inputs;
  auto* reduce_cmd = app.add_subcommand("reduce", "Apply a reduction plan to template files");
  reduce_cmd->add_option("--plan", plan_arg, "Plan JSON file or inline JSON")->required();
  reduce_cmd->add_option("inputs", reduce_inputs, "Template files")->required();
  reduce_cmd->callback([&] { action = [&] { return cmd_reduce(g, plan_arg, reduce_inputs, out, err); }; });

  EnrollArgs ea;
  auto* enroll_cmd = app.add_subcommand("enroll", "Encrypt integer templates into a gallery");
  enroll_cmd->add_option("--pubkey", ea.pubkey, "Public key JSON; generated when omitted");
  enroll_cmd->add_option("--bits", ea.bits, "Modulus size for a generated key")->capture_default_str();
  enroll_cmd->add_flag("--squares", ea.squares, "Store Enc(y^2) for truncated matching");
  enroll_cmd->add_flag("--deterministic", ea.deterministic, "Seeded encryption randomness (tests only)");
  enroll_cmd->add_option("inputs", ea.inputs, "Template files")->required();
  enroll_cmd->callback([&] { action = [&] { return cmd_enroll(g, ea, out, err); }; });

  MatchArgs ma;
  auto* match_cmd = app.add_subcommand("match", "Score probes against an encrypted gallery");
  match_cmd->add_option("--gallery", ma.gallery, "Encrypted gallery file")->required();
  match_cmd->add_option("--probe-file", ma.probe_file, "Probe template file")->required();
  match_cmd->add_option("--key", ma.key, "Key pair JSON (decrypts the scores)")->required();
  match_cmd->add_option("--selection", ma.selection, "all, fraction:k:i, interleave:x or head:n")
      ->capture_default_str();
  match_cmd->callback([&] { action = [&] { return cmd_match(g, ma, out, err); }; });

  EvalArgs va;
  auto* eval_cmd = app.add_subcommand("eval", "Run the EER experiment over a dimension grid");
  eval_cmd->add_option("--plan", va.plans, "Families such as fractions-binary, interleave-float, sum-q16")
      ->delimiter(',');
  eval_cmd->add_option("--grid", va.grid, "Dimensions, comma separated")->capture_default_str();
  eval_cmd->add_option("--seeds", va.seeds, "Dataset seeds, comma separated (default --seed)");
  eval_cmd->add_option("--backend", va.backend, "plaintext or encrypted")->capture_default_str();
  eval_cmd->add_option("--config", va.config, "Base SynthConfig JSON");
  eval_cmd->add_option("--subjects", va.subjects, "Virtual subjects")->capture_default_str();
  eval_cmd->add_option("--samples", va.samples, "Samples per modality")->capture_default_str();
  eval_cmd->add_option("--bits", va.bits, "Modulus size for the encrypted backend")->capture_default_str();
  eval_cmd->add_flag("--total-dim", va.total_dim, "Grid values are total fused lengths");
  eval_cmd->add_flag("--det", va.det, "Also write full-dimension DET curves (CSV and SVG)");
  eval_cmd->callback([&] { action = [&] { return cmd_eval(g, va, out, err); }; });

  std::string dims = "512";
  std::size_t slots = 4096;
  std::string kind = "float";
  auto* workload_cmd = app.add_subcommand("workload", "Estimate packed HE comparison cost");
  workload_cmd->add_option("--dim", dims, "Dimensions, comma separated")->capture_default_str();
  workload_cmd->add_option("--slots", slots, "SIMD slots per ciphertext")->capture_default_str();
  workload_cmd->add_option("--kind", kind, "float, int or binary")->capture_default_str();
  workload_cmd->callback([&] { action = [&] { return cmd_workload(g, dims, slots, kind, out, err); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand help requests surface as CallForHelp above; everything else is usage.
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitIo;
  }
}

}  // namespace biotrunc::cli
