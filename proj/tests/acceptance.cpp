// Acceptance suite: one line per criterion, PASS/FAIL/SKIP, nonzero exit on
// any FAIL. Criteria needing the challenge datasets run when the
// YARBUS_DSTC2_* / YARBUS_DSTC3_* environment variables point at them and
// are skipped with a reason otherwise.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dense_reference.hpp"
#include "random_gen.hpp"
#include "test_support.hpp"
#include "yarbus/belief.hpp"
#include "yarbus/extract.hpp"
#include "yarbus/preprocess.hpp"
#include "yarbus/runner.hpp"

using namespace yarbus;
using yarbus::test::act;
using yarbus::test::hyps;
using yarbus::test::mini_dir;
using yarbus::test::utt;

namespace {

struct Skip {
  std::string reason;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

template <typename T>
void require_eq(const T& got, const T& want, const std::string& what) {
  if (!(got == want)) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want;
    throw std::runtime_error(os.str());
  }
}

void require_close(double got, double want, double tol, const std::string& what) {
  if (!(std::fabs(got - want) <= tol)) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want << " within " << tol;
    throw std::runtime_error(os.str());
  }
}

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

// ---------------------------------------------------------------------------
// criterion 1: the worked examples, exact

void criterion_worked_examples() {
  const Ontology onto = Ontology::create({{"food", {"vietnamese", "romanian", "thai"}},
                                          {"area", {"north", "south"}},
                                          {"pricerange", {"cheap", "moderate"}},
                                          {"name", {"golden wok"}}});
  const DialogAct this_dc = act("inform", {{"this", "dontcare"}});

  // reference resolution, first dialog: request(slot=food) resolves this
  {
    const Utterance m = utt({act("request", {{"slot", "food"}})});
    const SluHypotheses in = hyps({{utt({this_dc}), 0.99},
                                   {utt({act("affirm"), this_dc}), 0.01}});
    const SluHypotheses out = unthis_hyps(in, m, onto);
    require_eq(out.entries.size(), std::size_t{2}, "first table size");
    const SluHypotheses want = hyps({{utt({act("inform", {{"food", "dontcare"}})}), 0.99},
                                     {utt({act("affirm"), act("inform", {{"food", "dontcare"}})}),
                                      0.01}});
    require(out == want, "first table rewrite");
  }

  // second dialog: no referent slot, this-acts vanish and duplicates merge
  {
    const Utterance m = utt({act("offer", {{"name", "golden wok"}}),
                             act("inform", {{"pricerange", "moderate"}}),
                             act("inform", {{"area", "north"}})});
    const SluHypotheses in = hyps({
        {utt({this_dc}), 0.40},
        {Utterance{}, 0.13},
        {utt({act("reqalts")}), 0.14},
        {utt({act("affirm"), this_dc}), 0.13},
        {utt({act("affirm")}), 0.07},
        {utt({act("ack")}), 0.06},
        {utt({act("negate"), this_dc}), 0.03},
        {utt({act("negate")}), 0.02},
        {utt({this_dc, act("inform", {{"area", "north"}})}), 0.02},
        {utt({act("thankyou")}), 0.01},
    });
    const SluHypotheses out = unthis_hyps(in, m, onto);
    auto prob_of = [&](const Utterance& u) {
      for (const auto& [cand, p] : out.entries)
        if (cand == u) return p;
      return -1.0;
    };
    require_eq(out.entries.size(), std::size_t{7}, "second table size");
    require_eq(prob_of(Utterance{}), 0.40 + 0.13, "merged empty utterance");
    require_eq(prob_of(utt({act("affirm")})), 0.13 + 0.07, "merged affirm");
    require_eq(prob_of(utt({act("negate")})), 0.03 + 0.02, "merged negate");
    require_eq(prob_of(utt({act("inform", {{"area", "north"}})})), 0.02, "area inform");
    require_eq(prob_of(utt({act("reqalts")})), 0.14, "reqalts");
    require_eq(prob_of(utt({act("ack")})), 0.06, "ack");
    require_eq(prob_of(utt({act("thankyou")})), 0.01, "thankyou");
    require_eq(out.total(), in.total(), "mass preservation");
  }

  // evidence fusion: negated expl-conf(vietnamese) against dontcare+romanian
  {
    const std::size_t food = *onto.slot_index("food");
    const Utterance m = utt({act("expl-conf", {{"food", "vietnamese"}})});
    const Utterance u_raw = utt({act("negate"), this_dc, act("inform", {{"food", "romanian"}})});
    const Utterance u = unthis_utterance(u_raw, m, onto);  // this -> food=dontcare

    const SlotEvidence ev = slot_evidence(m, u, food, onto, RuleMask::all());
    std::vector<std::uint32_t> want_pos{*onto.value_index(food, "dontcare"),
                                        *onto.value_index(food, "romanian")};
    require(ev.positives == want_pos, "vietnamese positives");
    require(ev.negatives == std::vector<std::uint32_t>{*onto.value_index(food, "vietnamese")},
            "vietnamese negatives");

    const auto fused = fuse_slot(ev, u);
    const std::vector<SlotInfo> want{
        SlotInfo::make_positive(*onto.value_index(food, "dontcare")),
        SlotInfo::make_positive(*onto.value_index(food, "romanian"))};
    require(fused == want, "vietnamese fusion is {{dontcare},{romanian}}");
  }

  // extraction around expl-conf(pricerange=cheap): one, two and one infos
  {
    const std::size_t price = *onto.slot_index("pricerange");
    const Utterance m = utt({act("expl-conf", {{"pricerange", "cheap"}})});
    const DialogAct inform_dc = act("inform", {{"pricerange", "dontcare"}});
    const SlotInfo dc = SlotInfo::make_positive(*onto.value_index(price, "dontcare"));
    const SlotInfo cheap = SlotInfo::make_positive(*onto.value_index(price, "cheap"));

    auto others_unknown = [&](const Info& info) {
      for (std::size_t s = 0; s < onto.slot_count(); ++s)
        if (s != price && info.slots[s].kind != SlotInfo::Kind::unknown) return false;
      return true;
    };

    const auto plain = extract_infos(m, utt({inform_dc}), onto, RuleMask::all());
    require(plain.size() == 1 && plain[0].slots[price] == dc && others_unknown(plain[0]),
            "plain inform yields the single dontcare info");

    const auto affirm = extract_infos(m, utt({act("affirm"), inform_dc}), onto, RuleMask::all());
    require(affirm.size() == 2, "affirm hypothesis yields two infos");
    std::vector<SlotInfo> got{affirm[0].slots[price], affirm[1].slots[price]};
    std::sort(got.begin(), got.end());
    std::vector<SlotInfo> want{cheap, dc};
    std::sort(want.begin(), want.end());
    require(got == want && others_unknown(affirm[0]) && others_unknown(affirm[1]),
            "affirm hypothesis infos are {cheap} and {dontcare}");

    const auto negate = extract_infos(m, utt({act("negate"), inform_dc}), onto, RuleMask::all());
    require(negate.size() == 1 && negate[0].slots[price] == dc && others_unknown(negate[0]),
            "negate hypothesis yields the single dontcare info");
  }

  // and the probability-sharing update over those hypotheses: 0.95 / 0.05
  {
    const Ontology price_only = Ontology::create({{"pricerange", {"cheap", "expensive"}}});
    const Utterance m = utt({act("expl-conf", {{"pricerange", "cheap"}})});
    const DialogAct inform_dc = act("inform", {{"pricerange", "dontcare"}});
    const SluHypotheses h = hyps({{utt({inform_dc}), 0.87},
                                  {utt({act("affirm"), inform_dc}), 0.10},
                                  {utt({act("negate"), inform_dc}), 0.03}});
    const Belief b = update(initial_belief(price_only), m, h, price_only, RuleMask::all());
    require_eq(b.size(), std::size_t{2}, "update worked example size");
    require_close(b.entries().at(goal_from_slots({{"pricerange", "dontcare"}}, price_only)), 0.95,
                  1e-12, "dontcare mass");
    require_close(b.entries().at(goal_from_slots({{"pricerange", "cheap"}}, price_only)), 0.05,
                  1e-12, "cheap mass");
  }
}

// ---------------------------------------------------------------------------
// criterion 2: dense-oracle equivalence on randomized dialogs

void criterion_dense_equivalence() {
  std::mt19937 rng(20260810);
  std::size_t instances = 0;
  for (int dialog = 0; dialog < 1000; ++dialog) {
    const Ontology onto = testgen::random_small_ontology(rng);
    const RuleMask mask = testgen::random_mask(rng);
    Belief b = initial_belief(onto);
    const int turns = 1 + static_cast<int>(rng() % 6);
    for (int t = 0; t < turns; ++t) {
      const Utterance m = testgen::random_machine(rng, onto);
      const SluHypotheses h =
          unthis_hyps(normalize_hyps(testgen::random_raw_hyps(rng, onto)), m, onto);

      const Belief sparse = update(b, m, h, onto, mask);
      const auto dense = testref::dense_update(b.entries(), m, h, onto, mask);
      require_eq(sparse.size(), dense.size(), "support size");
      for (const auto& [g, p] : dense)
        require(std::fabs(sparse.entries().at(g) - p) <= 1e-9, "per-goal tolerance 1e-9");
      ++instances;
      b = prune(sparse, 1e-2);
    }
  }
  require(instances >= 1000, "at least 1000 instances");
}

// ---------------------------------------------------------------------------
// criterion 3: the invariant suite

void criterion_invariants() {
  std::mt19937 rng(4242);

  // mass conservation over 10k random updates
  {
    Ontology onto = testgen::random_small_ontology(rng);
    Belief b = initial_belief(onto);
    for (int i = 0; i < 10000; ++i) {
      if (i % 40 == 0) {  // fresh dialog
        onto = testgen::random_small_ontology(rng);
        b = initial_belief(onto);
      }
      const Utterance m = testgen::random_machine(rng, onto);
      const SluHypotheses h =
          unthis_hyps(normalize_hyps(testgen::random_raw_hyps(rng, onto)), m, onto);
      const double before = b.mass();
      b = update(b, m, h, onto, testgen::random_mask(rng));
      require(std::fabs(b.mass() - before) <= 1e-9, "mass conservation within 1e-9");
      b = prune(b, 1e-2);
    }
  }

  // prune bound whenever pruning applies
  {
    const Ontology wide = Ontology::create({{"s", {"a", "b", "c", "d", "e", "f", "g", "h"}}});
    std::uniform_real_distribution<double> w(0.001, 1.0);
    std::uniform_real_distribution<double> th(0.02, 0.6);
    for (int i = 0; i < 2000; ++i) {
      Belief::Map entries;
      double total = 0.0;
      for (std::uint32_t v = 0; v < wide.values(0).size(); ++v) {
        Goal g;
        g.values = {v};
        entries[g] = w(rng);
        total += entries[g];
      }
      for (auto& [g, p] : entries) p /= total;
      const double theta = th(rng);
      const Belief pruned = prune(Belief(entries), theta);
      if (pruned.size() != entries.size())
        require(pruned.size() <= static_cast<std::size_t>(std::floor(1.0 / theta)),
                "prune bound floor(1/theta)");
    }
  }

  // transition totality across the goal/info shape cross product
  {
    const Ontology onto = Ontology::create({{"food", {"british", "french"}}});
    const auto british = *onto.value_index(0, "british");
    const auto french = *onto.value_index(0, "french");
    const auto dontcare = onto.dontcare_index(0);
    const std::vector<std::uint32_t> goal_shapes{Goal::kUnknown, dontcare, british};
    const std::vector<SlotInfo> info_shapes{
        SlotInfo::make_unknown(),           SlotInfo::make_positive(french),
        SlotInfo::make_positive(dontcare),  SlotInfo::make_negated({british}),
        SlotInfo::make_negated({dontcare}), SlotInfo::make_negated({british, french, dontcare})};
    for (std::uint32_t gv : goal_shapes) {
      for (const SlotInfo& si : info_shapes) {
        Goal g;
        g.values = {gv};
        Info info;
        info.slots = {si};
        const Goal out = transition(g, info);
        require(out == testref::transition_ref(g, info), "transition matches the reference");
        require(out.values[0] == Goal::kUnknown || out.values[0] < onto.values(0).size(),
                "transition stays in the goal domain");
      }
    }
  }

  // idempotence of unthis_hyps and normalize_hyps
  {
    const Ontology onto = testgen::random_small_ontology(rng);
    for (int i = 0; i < 500; ++i) {
      const Utterance m = testgen::random_machine(rng, onto);
      const SluHypotheses h = normalize_hyps(testgen::random_raw_hyps(rng, onto));
      const SluHypotheses once = unthis_hyps(h, m, onto);
      require(unthis_hyps(once, m, onto) == once, "unthis_hyps idempotent");
      const SluHypotheses renorm = normalize_hyps(once.entries);
      require(renorm.entries.size() == once.entries.size(), "normalize_hyps support stable");
      for (std::size_t k = 0; k < renorm.entries.size(); ++k)
        require(std::fabs(renorm.entries[k].second - once.entries[k].second) <= 1e-12,
                "normalize_hyps fixed point");
    }
  }

  // mask 00000 keeps the initial belief fixed
  {
    for (int i = 0; i < 200; ++i) {
      const Ontology onto = testgen::random_small_ontology(rng);
      const Belief b0 = initial_belief(onto);
      const Utterance m = testgen::random_machine(rng, onto);
      const SluHypotheses h =
          unthis_hyps(normalize_hyps(testgen::random_raw_hyps(rng, onto)), m, onto);
      const Belief b1 = update(b0, m, h, onto, RuleMask::none());
      require(b1.size() == 1 && b1.entries().begin()->first == Goal::all_unknown(onto),
              "mask 00000 fixes the all-unknown belief");
      require(std::fabs(b1.entries().begin()->second - 1.0) <= 1e-12, "fixity mass");
    }
  }
}

// ---------------------------------------------------------------------------
// dataset-conditional criteria

struct DatasetSpec {
  std::string name;
  std::string data_env, flist_env, onto_env;
};

RunConfig dataset_config(const DatasetSpec& ds) {
  RunConfig cfg;
  cfg.dataset_root = env_or_empty(ds.data_env.c_str());
  cfg.flist = env_or_empty(ds.flist_env.c_str());
  cfg.ontology_path = env_or_empty(ds.onto_env.c_str());
  cfg.dataset_name = ds.name;
  cfg.jobs = 8;
  return cfg;
}

bool dataset_available(const DatasetSpec& ds) {
  return !env_or_empty(ds.data_env.c_str()).empty() &&
         !env_or_empty(ds.flist_env.c_str()).empty() &&
         !env_or_empty(ds.onto_env.c_str()).empty();
}

const std::vector<std::pair<DatasetSpec, std::uint64_t>> kOracleCounts = {
    {{"dstc2_train", "YARBUS_DSTC2_DATA", "YARBUS_DSTC2_TRAIN_FLIST", "YARBUS_DSTC2_ONTOLOGY"}, 5},
    {{"dstc2_dev", "YARBUS_DSTC2_DATA", "YARBUS_DSTC2_DEV_FLIST", "YARBUS_DSTC2_ONTOLOGY"}, 1},
    {{"dstc2_test", "YARBUS_DSTC2_DATA", "YARBUS_DSTC2_TEST_FLIST", "YARBUS_DSTC2_ONTOLOGY"}, 183},
    {{"dstc3_test", "YARBUS_DSTC3_DATA", "YARBUS_DSTC3_TEST_FLIST", "YARBUS_DSTC3_ONTOLOGY"}, 0},
};

void criterion_oracle_counts() {
  bool any = false;
  for (const auto& [ds, want_mistakes] : kOracleCounts) {
    if (!dataset_available(ds)) continue;
    any = true;
    RunConfig cfg = dataset_config(ds);
    cfg.slu = SluSourceKind::oracle;

    RunResult full = run_track(cfg);
    require(full.warnings.empty(), ds.name + ": sessions failed to load");
    const MetricsReport* report = full.report_for(Schedule::after_evidence);
    require(report != nullptr, ds.name + ": no labels");
    require_eq(report->mistakes, want_mistakes, ds.name + " oracle mistakes");

    cfg.mask = RuleMask::parse("11011");
    RunResult no_implconf = run_track(cfg);
    require_eq(no_implconf.report_for(Schedule::after_evidence)->accuracy, 1.0,
               ds.name + " oracle accuracy without impl-conf");
  }
  if (!any)
    throw Skip{"DSTC datasets not present (set YARBUS_DSTC2_DATA/_ONTOLOGY/_*_FLIST and "
               "YARBUS_DSTC3_*)"};
}

void criterion_live_numbers() {
  const DatasetSpec test{"dstc2_test", "YARBUS_DSTC2_DATA", "YARBUS_DSTC2_TEST_FLIST",
                         "YARBUS_DSTC2_ONTOLOGY"};
  if (!dataset_available(test)) throw Skip{"dstc2_test not present"};

  RunConfig cfg = dataset_config(test);
  const RunResult live = run_track(cfg);
  const MetricsReport* r = live.report_for(Schedule::after_evidence);
  require(r != nullptr, "dstc2_test has no labels");
  require_close(r->accuracy, 0.725, 1e-3, "live accuracy");
  require_close(r->l2, 0.440, 1e-3, "live l2");
  require_close(r->roc_ca5, 0.0, 1e-3, "live roc");

  const std::string sjtu = env_or_empty("YARBUS_SJTU_DSTC2_TEST_SYS");
  if (!sjtu.empty()) {
    cfg.slu = SluSourceKind::file;
    cfg.slu_file = sjtu;
    const MetricsReport* rs = run_track(cfg).report_for(Schedule::after_evidence);
    require_close(rs->accuracy, 0.7592115, 1e-4, "test sjtu+sys accuracy");
    require_close(rs->l2, 0.3585286, 1e-4, "test sjtu+sys l2");
    require_close(rs->roc_ca5, 0.3289831, 1e-4, "test sjtu+sys roc");
  }

  const DatasetSpec dev{"dstc2_dev", "YARBUS_DSTC2_DATA", "YARBUS_DSTC2_DEV_FLIST",
                        "YARBUS_DSTC2_ONTOLOGY"};
  const std::string sjtu_dev = env_or_empty("YARBUS_SJTU_DSTC2_DEV_SYS");
  if (dataset_available(dev) && !sjtu_dev.empty()) {
    RunConfig dcfg = dataset_config(dev);
    dcfg.slu = SluSourceKind::file;
    dcfg.slu_file = sjtu_dev;
    const MetricsReport* rd = run_track(dcfg).report_for(Schedule::after_evidence);
    require_close(rd->accuracy, 0.8409802, 1e-4, "dev sjtu+sys accuracy");
    require_close(rd->l2, 0.2565311, 1e-4, "dev sjtu+sys l2");
    require_close(rd->roc_ca5, 0.2079975, 1e-4, "dev sjtu+sys roc");
  }
}

void criterion_belief_sizes() {
  // unconditional part: the bundled mini dataset stays under the prune cap
  RunConfig cfg;
  cfg.dataset_root = mini_dir();
  cfg.flist = mini_dir() + "/flist";
  cfg.ontology_path = mini_dir() + "/ontology.json";
  cfg.theta = 1e-2;
  const StatsResult mini = run_stats(cfg);
  require(mini.warnings.empty(), "mini sessions failed");
  require(mini.max_size <= 100, "mini max belief size <= 100 at theta 1e-2");

  const std::string sjtu = env_or_empty("YARBUS_SJTU_DSTC2_TEST_SYS");
  const DatasetSpec test{"dstc2_test", "YARBUS_DSTC2_DATA", "YARBUS_DSTC2_TEST_FLIST",
                         "YARBUS_DSTC2_ONTOLOGY"};
  if (dataset_available(test) && !sjtu.empty()) {
    RunConfig dcfg = dataset_config(test);
    dcfg.slu = SluSourceKind::file;
    dcfg.slu_file = sjtu;
    const StatsResult pruned = run_stats(dcfg);
    require(pruned.max_size <= 100, "pruned sizes stay near 30");
    dcfg.theta = 0.0;
    const StatsResult unpruned = run_stats(dcfg);
    require(unpruned.max_size >= 400, "unpruned sizes reach ~700");
  }
}

void criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path tmp = fs::temp_directory_path() / "yarbus_acceptance";
  fs::create_directories(tmp);

  RunConfig cfg;
  cfg.dataset_root = mini_dir();
  cfg.flist = mini_dir() + "/flist";
  cfg.ontology_path = mini_dir() + "/ontology.json";
  cfg.dataset_name = "mini";

  const auto t0 = std::chrono::steady_clock::now();
  cfg.jobs = 1;
  cfg.out_path = (tmp / "jobs1.json").string();
  run_track(cfg);
  cfg.jobs = 8;
  cfg.out_path = (tmp / "jobs8.json").string();
  run_track(cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  const std::string a = slurp(tmp / "jobs1.json");
  require(!a.empty(), "output written");
  require(a == slurp(tmp / "jobs8.json"), "byte-identical across --jobs 1 and --jobs 8");
  require(seconds < 1.0, "mini tracking under 1 s");
  fs::remove_all(tmp);

  const DatasetSpec test{"dstc2_test", "YARBUS_DSTC2_DATA", "YARBUS_DSTC2_TEST_FLIST",
                         "YARBUS_DSTC2_ONTOLOGY"};
  if (dataset_available(test)) {
    RunConfig dcfg = dataset_config(test);
    const auto d0 = std::chrono::steady_clock::now();
    run_track(dcfg);
    const double dstc_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - d0).count();
    require(dstc_seconds < 60.0, "full dstc2_test tracking under 60 s");
  }
}

struct Criterion {
  int number;
  std::string name;
  double time_limit;  // seconds, 0 = none
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "worked examples", 1.0, criterion_worked_examples},
      {2, "dense-oracle equivalence", 30.0, criterion_dense_equivalence},
      {3, "invariant suite", 30.0, criterion_invariants},
      {4, "oracle mistake counts", 0.0, criterion_oracle_counts},
      {5, "live/sjtu metrics", 0.0, criterion_live_numbers},
      {6, "belief sizes", 0.0, criterion_belief_sizes},
      {7, "determinism and runtime", 0.0, criterion_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string status = "PASS", detail;
    try {
      c.run();
    } catch (const Skip& s) {
      status = "SKIP";
      detail = s.reason;
    } catch (const std::exception& e) {
      status = "FAIL";
      detail = e.what();
      ++failures;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (status == "PASS" && c.time_limit > 0.0 && seconds > c.time_limit) {
      status = "FAIL";
      detail = "exceeded " + std::to_string(c.time_limit) + " s";
      ++failures;
    }
    std::ostringstream line;
    line << "criterion " << c.number << " (" << c.name << "): " << status;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << " [" << seconds << " s]";
    if (!detail.empty()) line << " - " << detail;
    std::cout << line.str() << "\n";
  }
  return failures == 0 ? 0 : 1;
}
