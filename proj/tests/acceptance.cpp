// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "biotrunc/cli.hpp"
#include "biotrunc/eval.hpp"
#include "biotrunc/he.hpp"
#include "biotrunc/io.hpp"
#include "biotrunc/match.hpp"
#include "biotrunc/reduce.hpp"
#include "biotrunc/rng.hpp"
#include "biotrunc/synth.hpp"

namespace fs = std::filesystem;
using namespace biotrunc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure; later checks keep running for the summary.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && pass_) {
      pass_ = false;
      first_ = what;
    }
    if (!ok) ++failures_;
  }
  Outcome outcome(const std::string& summary) const {
    if (pass_) return {true, summary};
    return {false, summary + "; " + std::to_string(failures_) + " failed checks, first: " + first_};
  }

 private:
  bool pass_ = true;
  std::size_t failures_ = 0;
  std::string first_;
};

QuantizedVector random_levels(rng::Engine& e, std::size_t dim, std::uint32_t q) {
  std::vector<std::uint32_t> v(dim);
  for (auto& x : v) x = static_cast<std::uint32_t>(e() % q);
  return QuantizedVector(std::move(v), q);
}

BinaryVector random_bits(rng::Engine& e, std::size_t dim) {
  std::vector<std::uint8_t> v(dim);
  for (auto& x : v) x = e() & 1u;
  return BinaryVector(std::move(v));
}

FeatureVector random_real(rng::Engine& e, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng::standard_normal(e);
  return FeatureVector(std::move(v));
}

Payload random_integer_payload(rng::Engine& e, std::size_t dim, std::uint32_t q) {
  if (q == 2) return random_bits(e, dim);
  return random_levels(e, dim, q);
}

// 1. Decrypted encrypted SED equals plaintext SED.
Outcome criterion_1() {
  const he::KeyPair key = he::keygen(512, 1001);
  he::NonceSource nonce = he::NonceSource::deterministic(1002);
  rng::Engine e = rng::stream(1003, {});
  Check c;
  std::size_t pairs = 0;
  for (std::uint32_t q : {2u, 16u}) {
    for (int i = 0; i < 1000; ++i) {
      const Payload y = random_integer_payload(e, 512, q);
      const Payload x = random_integer_payload(e, 512, q);
      const auto enc = he::enroll_encrypted(key.pub, y, nonce);
      const std::uint64_t got = he::decrypt_sed(key, he::encrypted_sed(key.pub, x, enc));
      const auto want = static_cast<std::uint64_t>(match::sed(x, y).value);
      c.expect(got == want, "q=" + std::to_string(q) + " pair " + std::to_string(i));
      ++pairs;
    }
  }
  return c.outcome(std::to_string(pairs) + " pairs at d=512, q in {2,16}, 512-bit modulus");
}

// 2. Homomorphic identities and the toy-modulus round trip.
Outcome criterion_2() {
  const he::KeyPair key = he::keygen(512, 2001);
  const BigUint& n = key.pub.n();
  he::NonceSource nonce = he::NonceSource::deterministic(2002);
  rng::Engine e = rng::stream(2003, {});
  Check c;
  for (int i = 0; i < 1000; ++i) {
    const BigUint a = random_below(n, e), b = random_below(n, e), s = random_below(n, e);
    const auto ca = he::encrypt(key.pub, a, nonce);
    const auto cb = he::encrypt(key.pub, b, nonce);
    c.expect(he::decrypt(key, ca) == a, "round trip " + std::to_string(i));
    c.expect(he::decrypt(key, he::add(key.pub, ca, cb)) == (a + b) % n, "add " + std::to_string(i));
    c.expect(he::decrypt(key, he::scalar_mul(key.pub, ca, s)) == (a * s) % n, "scalar " + std::to_string(i));
  }
  const he::KeyPair toy = he::key_from_primes(BigUint(5), BigUint(7), 2004);
  he::NonceSource toy_nonce = he::NonceSource::deterministic(2005);
  for (std::uint64_t m = 0; m < 35; ++m) {
    const auto ct = he::encrypt(toy.pub, BigUint(m), toy_nonce);
    c.expect(he::decrypt(toy, ct) == BigUint(m) && he::decrypt_reference(toy, ct) == BigUint(m),
             "n=35 message " + std::to_string(m));
  }
  return c.outcome("1000 add/scalar trials at 512 bits; n=35 exhaustive over 35 messages");
}

// 3. Truncation algebra.
Outcome criterion_3() {
  rng::Engine e = rng::stream(3001, {});
  Check c;
  for (int trial = 0; trial < 200; ++trial) {
    const FeatureVector v = random_real(e, 512);
    const QuantizedVector lv = random_levels(e, 512, 16);
    c.expect(reduce::interleave(v, 1) == v, "interleave(v,1)");
    c.expect(reduce::fraction(v, 1, 1) == v && reduce::sum_fractions(v, 1) == v, "identity cases");
    for (std::size_t k : {2u, 4u, 8u}) {
      std::vector<FeatureVector> parts;
      for (std::size_t i = 1; i <= k; ++i) parts.push_back(reduce::fraction(v, k, i));
      c.expect(concat(parts) == v, "fraction partition k=" + std::to_string(k));

      const FeatureVector sum = reduce::sum_fractions(v, k);
      const auto level_sum = integer_elements(reduce::sum_fractions(lv, k));
      const std::size_t len = 512 / k;
      bool ok = sum.dim() == len && level_sum.size() == len;
      for (std::size_t j = 0; ok && j < len; ++j) {
        double s = 0.0;
        std::uint32_t ls = 0;
        for (std::size_t i = 1; i <= k; ++i) {
          s += reduce::fraction(v, k, i)[j];
          ls += reduce::fraction(lv, k, i)[j];
        }
        ok = sum[j] == s && level_sum[j] == ls;
      }
      c.expect(ok, "sum_fractions k=" + std::to_string(k));

      const std::size_t x = k;
      const FeatureVector il = reduce::interleave(v, x);
      bool stride = il.dim() == 512 / x;
      for (std::size_t j = 0; stride && j < il.dim(); ++j) stride = il[j] == v[j * x];
      c.expect(stride, "interleave x=" + std::to_string(x));
    }
  }
  // Binary SED equals Hamming: exhaustive for d <= 8, every vector against
  // 16 sampled partners for 9 <= d <= 16.
  std::size_t compared = 0;
  for (std::size_t d = 1; d <= 16; ++d) {
    auto bits = [d](std::uint32_t w) {
      std::vector<std::uint8_t> b(d);
      for (std::size_t i = 0; i < d; ++i) b[i] = (w >> i) & 1u;
      return BinaryVector(std::move(b));
    };
    const std::uint32_t count = 1u << d;
    for (std::uint32_t x = 0; x < count; ++x) {
      const BinaryVector a = bits(x);
      const std::uint32_t partners = d <= 8 ? count : 16;
      for (std::uint32_t s = 0; s < partners; ++s) {
        const std::uint32_t y = d <= 8 ? s : static_cast<std::uint32_t>(e() % count);
        const BinaryVector b = bits(y);
        const auto h = match::hamming(a, b);
        if (h != match::sed(a, b) || h != static_cast<std::uint64_t>(std::popcount(x ^ y))) {
          c.expect(false, "hamming d=" + std::to_string(d));
        }
        ++compared;
      }
    }
  }
  return c.outcome("k,x in {2,4,8} over 200 vectors at d=512; " + std::to_string(compared) +
                   " binary pairs for d <= 16");
}

// 4. SED of a concatenation equals the sum of per-part SEDs.
Outcome criterion_4() {
  rng::Engine e = rng::stream(4001, {});
  Check c;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 2 + e() % 1535;
    const std::size_t parts = 2 + e() % 3;
    std::vector<std::size_t> cuts = {0, dim};
    while (cuts.size() < parts + 1) {
      const std::size_t cut = 1 + e() % (dim - 1);
      if (std::find(cuts.begin(), cuts.end(), cut) == cuts.end()) cuts.push_back(cut);
      if (cuts.size() == dim + 1) break;
    }
    std::sort(cuts.begin(), cuts.end());
    const std::uint32_t q = trial % 2 ? 2 : 256;
    const Payload a = random_integer_payload(e, dim, q), b = random_integer_payload(e, dim, q);
    std::vector<match::Score> per;
    std::vector<Template> ta, tb;
    std::vector<Modality> order;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      std::vector<std::size_t> idx;
      for (std::size_t i = cuts[p]; i < cuts[p + 1]; ++i) idx.push_back(i);
      const Payload pa = reduce::select(a, idx), pb = reduce::select(b, idx);
      per.push_back(match::sed(pa, pb));
      order.emplace_back("m" + std::to_string(p));
      ta.push_back({pa, "S", 0, order.back()});
      tb.push_back({pb, "S", 0, order.back()});
    }
    const double whole = match::sed(a, b).value;
    const double fused = match::sed(reduce::fuse_concat(ta, order).payload, reduce::fuse_concat(tb, order).payload).value;
    c.expect(match::score_fusion_sum(per).value == whole && fused == whole, "split " + std::to_string(trial));
  }
  return c.outcome("1000 random splits, binary and 256-level vectors");
}

// Exhaustive threshold scan written independently of the library.
double scan_eer(const eval::ScoreSet& s) {
  std::vector<double> t = {-std::numeric_limits<double>::infinity()};
  t.insert(t.end(), s.mated.begin(), s.mated.end());
  t.insert(t.end(), s.non_mated.begin(), s.non_mated.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  t.push_back(std::numeric_limits<double>::infinity());
  std::vector<double> fmr, fnmr;
  for (double th : t) {
    double a = 0, b = 0;
    for (double x : s.non_mated) a += x <= th;
    for (double x : s.mated) b += x > th;
    fmr.push_back(a / static_cast<double>(s.non_mated.size()));
    fnmr.push_back(b / static_cast<double>(s.mated.size()));
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (fmr[i] == fnmr[i]) return fmr[i];
    if (fmr[i] > fnmr[i]) {
      const double d0 = fnmr[i - 1] - fmr[i - 1], d1 = fmr[i] - fnmr[i];
      return fmr[i - 1] + d0 / (d0 + d1) * (fmr[i] - fmr[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// 5. Interpolated EER against the threshold-scan oracle.
Outcome criterion_5() {
  rng::Engine e = rng::stream(5001, {});
  Check c;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    eval::ScoreSet s;
    const std::size_t total = 2 + e() % 31;
    const std::size_t nm = 1 + e() % (total - 1);
    const bool ties = trial % 2 == 0;
    for (std::size_t i = 0; i < total; ++i) {
      const double v = ties ? static_cast<double>(e() % 8) : rng::uniform_open(e) * 4.0;
      (i < nm ? s.mated : s.non_mated).push_back(i < nm ? v : v + (ties ? 2.0 : 1.0));
    }
    const double diff = std::abs(eval::eer(s).eer - scan_eer(s));
    worst = std::max(worst, diff);
    c.expect(diff <= 1e-9, "set " + std::to_string(trial));
  }
  const auto worked = eval::eer(eval::ScoreSet{{1, 2, 3, 4}, {3, 4, 5, 6}});
  c.expect(std::abs(worked.eer - 0.25) <= 1e-12 && worked.threshold == 3.0, "worked example");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1e", worst);
  return c.outcome(std::string("50 random sets, max |diff| ") + buf + "; worked example 0.25 at threshold 3");
}

// 6. Trends on the default synthetic configuration over seeds 1..5.
Outcome criterion_6() {
  Check c;
  int wins_b = 0, wins_c = 0, worst_inversions = 0;
  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    eval::ExperimentSpec spec;
    spec.data.seed = seed;
    spec.families = {{reduce::NoQuantization{}, eval::Method::kFraction}};
    const MultiDataset ds = synth::generate(spec.data);
    const auto table = eval::run_experiment(spec, ds).front();
    c.expect(!table.partial, "seed " + std::to_string(seed) + " table partial: " + table.error);
    if (table.partial) continue;

    // (a) at most one inversion per column.
    for (std::size_t col = 0; col < table.columns.size(); ++col) {
      int inversions = 0;
      for (std::size_t r = 1; r < table.rows.size(); ++r) {
        inversions += table.rows[r].cells[col].mean > table.rows[r - 1].cells[col].mean;
      }
      worst_inversions = std::max(worst_inversions, inversions);
      c.expect(inversions <= 1, "6a seed " + std::to_string(seed) + " column " + table.columns[col]);
    }

    const auto& full = table.rows.back();
    double best_single = 1.0;
    for (std::size_t col = 1; col < table.columns.size(); ++col) best_single = std::min(best_single, full.cells[col].mean);
    const auto row128 = std::find_if(table.rows.begin(), table.rows.end(), [](const auto& r) { return r.dim == 128; });
    const double fused128 = row128->cells[0].mean;

    // (c) fused 171/171/170 against the best single modality.
    const auto pairs = synth::enumerate_comparisons(ds);
    const auto split = reduce::split_total(512, 3);
    eval::Recipe r;
    for (std::size_t m = 0; m < 3; ++m) {
      r.parts.push_back({ds.modalities()[m], {reduce::NoQuantization{}, reduce::HeadTruncation{split[m]}, {}}});
    }
    const double fused512 = eval::eer(eval::collect_scores(ds, r, pairs)).eer;

    wins_b += fused128 <= best_single;
    wins_c += fused512 <= best_single;
    char buf[160];
    std::snprintf(buf, sizeof buf, " [seed %llu: best single %.4f, fused 3x128 %.4f, fused 171/171/170 %.4f]",
                  static_cast<unsigned long long>(seed), best_single, fused128, fused512);
    detail << buf;
  }
  c.expect(wins_b >= 4, "6b fused 3x128 wins " + std::to_string(wins_b) + "/5");
  c.expect(wins_c >= 4, "6c fused 171/171/170 wins " + std::to_string(wins_c) + "/5");
  return c.outcome("(a) max inversions " + std::to_string(worst_inversions) + "; (b) " + std::to_string(wins_b) +
                   "/5; (c) " + std::to_string(wins_c) + "/5;" + detail.str());
}

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::vector<const char*> argv = {"biotrunc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, err);
  if (out) *out = o.str();
  return code;
}

// 7. Packed workload model.
Outcome criterion_7(const fs::path& tmp) {
  Check c;
  const auto b512 = he::workload_estimate(512, he::PackedKind::kBinary, 4096);
  const auto f1536 = he::workload_estimate(1536, he::PackedKind::kFloat, 4096);
  c.expect(b512.rotations == 9 && he::workload_estimate(512, he::PackedKind::kFloat).rotations == 9, "512 -> 9");
  c.expect(f1536.rotations == 11, "1536 -> 11");
  const double ratio = he::operation_ratio(f1536, b512);
  c.expect(ratio == 23.0 / 19.0, "ratio");
  std::string out;
  c.expect(run_cli({"--format", "json", "--out", (tmp / "workload").string(), "workload", "--dim", "512,1536"}, &out) == 0,
           "workload command");
  const auto j = io::parse_json(out, "workload");
  c.expect(j["reports"][0]["rotations"] == 9 && j["reports"][1]["rotations"] == 11, "report rotations");
  c.expect(j["reference"]["operation_ratio_float_1536_over_binary_512"] == ratio, "report ratio");
  const std::string note = j["reference"]["note"];
  c.expect(note.find("442") != std::string::npos && note.find("wall-clock") != std::string::npos, "report note");
  char buf[96];
  std::snprintf(buf, sizeof buf, "rotations 9 and 11; float-1536 / binary-512 operation ratio %.4f", ratio);
  return c.outcome(buf);
}

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) h = (h ^ b) * 0x100000001b3ULL;
  return h;
}

// 8. Deterministic synth output and bit-exact format round trips.
Outcome criterion_8(const fs::path& tmp) {
  Check c;
  const std::vector<std::string> files = {"face.btrc", "fingerprint.btrc", "iris.btrc", "manifest.json"};
  for (const char* run : {"a", "b", "c"}) {
    const std::string threads = std::string(run) == "c" ? "3" : "1";
    c.expect(run_cli({"--seed", "42", "--threads", threads, "--out", (tmp / run).string(), "synth"}) == 0, "synth run");
  }
  for (const auto& f : files) {
    const auto a = io::read_file(tmp / "a" / f);
    c.expect(a == io::read_file(tmp / "b" / f), "repeat differs: " + f);
    c.expect(a == io::read_file(tmp / "c" / f), "thread count changes " + f);
  }
  // Pinned digest of a default-config file: any platform producing other
  // bytes fails here.
  const std::uint64_t digest = fnv1a(io::read_file(tmp / "a" / "iris.btrc"));
  c.expect(digest == 0x76d818e5efddfd35ULL, "iris.btrc digest changed");

  // Round trips.
  const auto templates = io::read_templates(tmp / "a" / "face.btrc");
  std::vector<Template> quantized, binary;
  const std::vector<Template>* sets[] = {&templates, &quantized, &binary};
  for (const auto& t : templates) {
    quantized.push_back(reduce::apply_plan(t, {reduce::LevelQuantization{16, {}, reduce::Rounding::kFloor}, {}, {}}));
    binary.push_back(reduce::apply_plan(t, {reduce::BinaryQuantization{0.0}, reduce::FractionTruncation{4, 3}, {}}));
  }
  for (const auto* set : sets) {
    const auto bytes = io::encode_templates(*set);
    c.expect(io::decode_templates(bytes) == *set, "template round trip");
    c.expect(io::encode_templates(io::decode_templates(bytes)) == bytes, "template bytes");
  }
  const he::KeyPair key = he::keygen(256, 8001);
  he::NonceSource nonce = he::NonceSource::deterministic(8002);
  std::vector<he::EncryptedTemplate> gallery;
  for (std::size_t i = 0; i < 4; ++i) gallery.push_back(he::enroll_encrypted(key.pub, quantized[i].payload, nonce, i % 2));
  const auto gbytes = io::encode_gallery(gallery, key.pub);
  c.expect(io::encode_gallery(io::decode_gallery(gbytes, key.pub), key.pub) == gbytes, "gallery bytes");
  const std::string kj = io::key_pair_to_json(key).dump();
  c.expect(io::key_pair_to_json(io::key_pair_from_json(io::parse_json(kj, "k"))).dump() == kj, "key json");
  const reduce::ReductionPlan plan{reduce::LevelQuantization{8, {-0.5, 0.5}, reduce::Rounding::kNearest},
                                   reduce::InterleaveTruncation{4, false}, reduce::ConcatFusion{}};
  c.expect(io::plan_from_json(io::parse_json(io::plan_to_json(plan).dump(), "p")) == plan, "plan json");
  const auto cfg = synth::SynthConfig::desk_default();
  c.expect(io::synth_config_from_json(io::parse_json(io::synth_config_to_json(cfg).dump(), "c")) == cfg, "config json");

  char buf[160];
  std::snprintf(buf, sizeof buf, "synth byte-identical over 2 runs and 1 vs 3 threads (iris digest %016llx); "
                "template, gallery and JSON round trips", static_cast<unsigned long long>(digest));
  return c.outcome(buf);
}

}  // namespace

int main() {
  const fs::path tmp = fs::temp_directory_path() / "biotrunc_acceptance";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 encrypted/plaintext SED equivalence", criterion_1},
      {"2 homomorphic identities", criterion_2},
      {"3 truncation algebra", criterion_3},
      {"4 fusion/SED equivalence", criterion_4},
      {"5 EER oracle", criterion_5},
      {"6 dimension and fusion trends", criterion_6},
      {"7 workload model", [&] { return criterion_7(tmp); }},
      {"8 determinism and round trips", [&] { return criterion_8(tmp); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  fs::remove_all(tmp);
  return failed == 0 ? 0 : 1;
}
