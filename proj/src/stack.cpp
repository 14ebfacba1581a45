#include "edrisk/stack.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "edrisk/cohort.hpp"
#include "edrisk/rng.hpp"
#include "edrisk/util.hpp"

namespace edrisk {

namespace {

SparseRow meta_row(const std::array<double, 4>& base, MetaFeatureMode mode) {
  SparseRow row;
  row.reserve(4);
  for (std::uint32_t j = 0; j < 4; ++j) {
    double v = base[j];
    if (mode == MetaFeatureMode::log_odds) {
      const double p = std::clamp(v, 1e-9, 1.0 - 1e-9);
      v = std::log(p / (1.0 - p));
    }
    row.push_back({j, v});
  }
  return row;
}

std::array<double, 4> base_probs(const EnsembleModel& model, const FeatureVector& x,
                                 const Itemset& longitudinal, const Itemset& horizontal) {
  return {predict_logistic(model.logistic, x), predict_naive_bayes(model.nb, x),
          model.arc1.classify(longitudinal)[1], model.arc2.classify(horizontal)[1]};
}

}  // namespace

SplitAssignment split_dataset(const VisitTable& visits,
                              std::span<const LabeledIndexVisit> instances, std::uint64_t seed,
                              SplitUnit unit) {
  const std::size_t n = instances.size();
  if (n < 10) throw Error("split_dataset: need at least 10 instances, got " + std::to_string(n));

  SplitAssignment out;
  out.seed = seed;
  out.unit = unit;
  out.subsets.assign(n, Subset::train);

  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;

  Rng rng(splitmix64(seed));
  if (unit == SplitUnit::record) {
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t pos = 0; pos < n; ++pos) {
      Subset s = pos < n_train ? Subset::train
                 : pos < n_train + n_val ? Subset::validation
                                         : Subset::test;
      out.subsets[order[pos]] = s;
    }
  } else {
    // Keep each patient intact: walk patients in shuffled order and fill the
    // subsets to their target sizes in instance count.
    std::vector<std::string> patients;
    std::unordered_map<std::string, std::vector<std::uint32_t>> members;
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::string& key = visits[instances[i].visit_index].patient_key;
      auto [it, inserted] = members.try_emplace(key);
      if (inserted) patients.push_back(key);
      it->second.push_back(i);
    }
    rng.shuffle(patients);
    std::size_t filled = 0;
    for (const std::string& key : patients) {
      Subset s = filled < n_train ? Subset::train
                 : filled < n_train + n_val ? Subset::validation
                                            : Subset::test;
      for (std::uint32_t i : members[key]) out.subsets[i] = s;
      filled += members[key].size();
    }
  }
  for (Subset s : out.subsets) ++out.counts[static_cast<std::size_t>(s)];
  return out;
}

WindowDataset build_window_dataset(const VisitTable& visits,
                                   const std::vector<PatientTimeline>& timelines,
                                   int window_days) {
  WindowDataset ds;
  ds.instances = label_index_visits(visits, timelines, window_days);
  const std::size_t n = ds.instances.size();
  ds.contexts.reserve(n);
  ds.longitudinal.reserve(n);
  ds.horizontal.reserve(n);
  ds.labels.reserve(n);
  for (const LabeledIndexVisit& inst : ds.instances) {
    const PatientTimeline& tl = timelines[inst.timeline_index];
    ds.contexts.push_back(compute_temporal_context(visits, tl, inst.visit_index));
    ds.longitudinal.push_back(extract_longitudinal_itemset(visits, tl, inst.visit_index));
    ds.horizontal.push_back(extract_horizontal_itemset(visits[inst.visit_index]));
    ds.labels.push_back(inst.label ? 1 : 0);
  }
  return ds;
}

TrainedWindow train_ensemble(const VisitTable& visits,
                             const std::vector<PatientTimeline>& timelines, int window_days,
                             const TrainOptions& options) {
  const WindowDataset ds = build_window_dataset(visits, timelines, window_days);
  const SplitAssignment split =
      split_dataset(visits, ds.instances, options.split_seed, options.split_unit);

  std::array<std::vector<std::uint32_t>, 3> members;
  for (std::uint32_t i = 0; i < ds.instances.size(); ++i)
    members[static_cast<std::size_t>(split.subsets[i])].push_back(i);
  const auto& train_idx = members[0];
  const auto& val_idx = members[1];
  if (train_idx.empty()) throw Error("train_ensemble: empty training split");
  if (val_idx.empty()) throw Error("train_ensemble: empty validation split");

  TrainedWindow out;
  EnsembleModel& model = out.model;
  TrainingReport& report = out.report;
  model.window_days = window_days;
  model.split_seed = options.split_seed;
  model.split_unit = options.split_unit;
  model.meta_mode = options.meta_mode;
  report.window_days = window_days;
  report.split_seed = options.split_seed;
  report.split_unit = options.split_unit;
  report.split_counts = split.counts;
  for (std::uint32_t i = 0; i < ds.instances.size(); ++i)
    if (ds.labels[i]) ++report.split_positives[static_cast<std::size_t>(split.subsets[i])];
  if (options.split_unit == SplitUnit::record)
    report.warnings.push_back(
        "record-unit split can place one patient's visits in different subsets");

  auto stage = [&](const char* name, const char* input, auto&& fn) {
    report.stage_inputs.emplace_back(name, input);
    try {
      fn();
    } catch (const Error& e) {
      throw Error(std::string("stage ") + name + ": " + e.what());
    }
  };

  std::vector<LabeledIndexVisit> train_instances;
  std::vector<TemporalContext> train_contexts;
  for (std::uint32_t i : train_idx) {
    train_instances.push_back(ds.instances[i]);
    train_contexts.push_back(ds.contexts[i]);
  }

  stage("vocabulary", "train", [&] {
    if (options.fixed_vocabulary) {
      model.vocab = *options.fixed_vocabulary;
    } else {
      std::ostringstream tag;
      tag << "train:w" << window_days << ":seed" << options.split_seed << ":unit"
          << (options.split_unit == SplitUnit::record ? "record" : "patient");
      model.vocab = build_vocabulary(visits, train_instances, train_contexts,
                                     options.count_bin_cap, tag.str());
    }
  });
  report.vocabulary_dimension = model.vocab.dimension();

  std::vector<FeatureVector> train_x;
  std::vector<std::uint8_t> train_y;
  train_x.reserve(train_idx.size());
  for (std::uint32_t i : train_idx) {
    train_x.push_back(
        encode_visit(visits[ds.instances[i].visit_index], ds.contexts[i], model.vocab));
    train_y.push_back(ds.labels[i]);
  }

  stage("lr", "train", [&] { model.logistic = fit_logistic(train_x, train_y, options.lr); });
  report.lr_final_loss = model.logistic.final_loss;
  report.lr_epochs = model.logistic.epochs_run;

  stage("nb", "train", [&] { model.nb = fit_naive_bayes(train_x, train_y, options.nb_alpha); });

  auto make_transactions = [&](const std::vector<Itemset>& views) {
    std::vector<Transaction> txns;
    txns.reserve(train_idx.size());
    for (std::uint32_t i : train_idx) txns.push_back({views[i], ds.labels[i] != 0});
    return txns;
  };

  stage("arc1", "train", [&] {
    const SupportTuneResult tuned =
        tune_support_threshold(make_transactions(ds.longitudinal), options.arc_grid,
                               ItemsetView::longitudinal, options.arc_max_len, options.tie_break);
    model.arc1 = tuned.rules;
    report.arc1_threshold = tuned.threshold;
    report.arc1_grid_auc = tuned.grid_auc;
    report.arc1_rules = tuned.rules.rules().size();
  });

  stage("arc2", "train", [&] {
    const SupportTuneResult tuned =
        tune_support_threshold(make_transactions(ds.horizontal), options.arc_grid,
                               ItemsetView::horizontal, options.arc_max_len, options.tie_break);
    model.arc2 = tuned.rules;
    report.arc2_threshold = tuned.threshold;
    report.arc2_grid_auc = tuned.grid_auc;
    report.arc2_rules = tuned.rules.rules().size();
  });

  stage("meta", "validation", [&] {
    std::vector<SparseRow> rows;
    std::vector<std::uint8_t> labels;
    rows.reserve(val_idx.size());
    for (std::uint32_t i : val_idx) {
      const FeatureVector x =
          encode_visit(visits[ds.instances[i].visit_index], ds.contexts[i], model.vocab);
      rows.push_back(
          meta_row(base_probs(model, x, ds.longitudinal[i], ds.horizontal[i]), options.meta_mode));
      labels.push_back(ds.labels[i]);
    }
    model.meta = fit_logistic_rows(rows, 4, labels, options.meta_lr);
  });
  report.meta_weights = model.meta.weights;
  report.meta_weights.push_back(model.meta.intercept);

  stage("leakage_audit", "train", [&] {
    out.audit = audit_feature_leakage(train_x, train_y, model.vocab, options.audit_min_count,
                                      options.audit_rate_threshold);
  });

  return out;
}

BaseScores predict_ensemble(const EnsembleModel& model, const VisitTable& visits,
                            const PatientTimeline& timeline, std::uint32_t visit_index) {
  if (model.meta.dimension != 4) throw Error("predict_ensemble: meta model must have dimension 4");
  const TemporalContext ctx = compute_temporal_context(visits, timeline, visit_index);
  const FeatureVector x = encode_visit(visits[visit_index], ctx, model.vocab);
  const Itemset longitudinal = extract_longitudinal_itemset(visits, timeline, visit_index);
  const Itemset horizontal = extract_horizontal_itemset(visits[visit_index]);
  const std::array<double, 4> base = base_probs(model, x, longitudinal, horizontal);
  BaseScores scores;
  scores.lr = base[0];
  scores.nb = base[1];
  scores.arc1 = base[2];
  scores.arc2 = base[3];
  scores.ensemble = predict_logistic_row(model.meta, meta_row(base, model.meta_mode));
  return scores;
}

EvalReport evaluate_all(const std::vector<const EnsembleModel*>& models, const VisitTable& visits,
                        const std::vector<PatientTimeline>& timelines) {
  EvalReport report;
  for (const EnsembleModel* model : models) {
    EvalRow row;
    row.window_days = model->window_days;
    try {
      const WindowDataset ds = build_window_dataset(visits, timelines, model->window_days);
      const SplitAssignment split =
          split_dataset(visits, ds.instances, model->split_seed, model->split_unit);
      std::vector<double> lr, nb, a1, a2, ens;
      std::vector<std::uint8_t> labels;
      for (std::uint32_t i = 0; i < ds.instances.size(); ++i) {
        if (split.subsets[i] != Subset::test) continue;
        const BaseScores s = predict_ensemble(*model, visits, timelines[ds.instances[i].timeline_index],
                                              ds.instances[i].visit_index);
        lr.push_back(s.lr);
        nb.push_back(s.nb);
        a1.push_back(s.arc1);
        a2.push_back(s.arc2);
        ens.push_back(s.ensemble);
        labels.push_back(ds.labels[i]);
      }
      row.test_instances = labels.size();
      for (std::uint8_t l : labels) row.test_positives += l;
      row.lr = auc(lr, labels);
      row.arc1 = auc(a1, labels);
      row.arc2 = auc(a2, labels);
      row.nb = auc(nb, labels);
      row.ensemble = auc(ens, labels);
    } catch (const Error& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string TrainingReport::to_text() const {
  std::ostringstream ss;
  ss << "training_report 1\n";
  ss << "window " << window_days << '\n';
  ss << "split seed=" << split_seed << " unit="
     << (split_unit == SplitUnit::record ? "record" : "patient") << " train=" << split_counts[0]
     << " validation=" << split_counts[1] << " test=" << split_counts[2] << '\n';
  ss << "positives train=" << split_positives[0] << " validation=" << split_positives[1]
     << " test=" << split_positives[2] << '\n';
  ss << "vocabulary dimension=" << vocabulary_dimension << '\n';
  ss << "lr final_loss=" << fmt_double(lr_final_loss) << " epochs=" << lr_epochs << '\n';
  auto grid_text = [](const std::vector<std::pair<std::uint32_t, double>>& grid) {
    std::string s;
    for (const auto& [threshold, value] : grid) {
      if (!s.empty()) s += ' ';
      s += "auc@" + std::to_string(threshold) + "=" + fmt_double(value);
    }
    return s.empty() ? std::string("auc@-") : s;
  };
  ss << "arc1 threshold=" << arc1_threshold << " rules=" << arc1_rules << ' '
     << grid_text(arc1_grid_auc) << '\n';
  ss << "arc2 threshold=" << arc2_threshold << " rules=" << arc2_rules << ' '
     << grid_text(arc2_grid_auc) << '\n';
  ss << "meta weights=";
  for (std::size_t i = 0; i < meta_weights.size(); ++i) {
    if (i) ss << ',';
    ss << fmt_double(meta_weights[i]);
  }
  ss << '\n';
  for (const auto& [name, input] : stage_inputs) ss << "stage " << name << " consumed=" << input << '\n';
  for (const std::string& w : warnings) ss << "warning " << w << '\n';
  return ss.str();
}

std::string EvalReport::to_text() const {
  std::ostringstream ss;
  ss << "window\tLR\tARC1\tARC2\tNB\tEnsemble\n";
  for (const EvalRow& row : rows) {
    ss << row.window_days << "-day\t";
    if (!row.error.empty()) {
      ss << "error: " << row.error << '\n';
      continue;
    }
    ss << fmt_double(row.lr) << '\t' << fmt_double(row.arc1) << '\t' << fmt_double(row.arc2)
       << '\t' << fmt_double(row.nb) << '\t' << fmt_double(row.ensemble) << '\n';
  }
  ss << '\n';
  ss << "window\ttest_instances\ttest_positives\tpositive_rate\n";
  for (const EvalRow& row : rows) {
    ss << row.window_days << "-day\t" << row.test_instances << '\t' << row.test_positives << '\t';
    if (row.test_instances == 0)
      ss << "-\n";
    else
      ss << fmt_double(static_cast<double>(row.test_positives) /
                       static_cast<double>(row.test_instances))
         << '\n';
  }
  return ss.str();
}

}  // namespace edrisk
