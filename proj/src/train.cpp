// SPDX-License-Identifier: Apache-2.0
#include "awp/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "awp/error.hpp"
#include "awp/util.hpp"

namespace awp::model {
namespace {

void validate(const TrainConfig& c) {
  if (c.epochs_max < 1) throw UsageError("epochs_max must be at least 1");
  if (c.batch_size < 1) throw UsageError("batch size must be at least 1");
  if (c.embed_dim < 1 || c.hidden_dim < 1) throw UsageError("dimensions must be at least 1");
  if (!(c.learning_rate >= 0.0)) throw UsageError("learning rate must be non-negative");
  if (c.clip_norm < 0.0) throw UsageError("clip norm must be non-negative");
}

}  // namespace

Dims make_dims(const VocabSet& vocabs, const TrainConfig& config, const text::ClassMap& class_map) {
  Dims d;
  d.embed = config.embed_dim;
  d.hidden = config.hidden_dim;
  d.code_vocab = static_cast<int>(vocabs.code.size());
  d.ast_vocab = config.input.variant == Variant::ast_attendgru ? static_cast<int>(vocabs.ast.size()) : 0;
  d.summary_vocab = static_cast<int>(vocabs.summary.size());
  d.classes = static_cast<int>(class_map.num_classes());
  d.variant = config.input.variant;
  d.objective = config.objective;
  return d;
}

double class_accuracy(const Model& model, std::span<const corpus::FunctionRecord> records,
                      const text::VerbLexicon& lexicon, const text::ClassMap& class_map) {
  if (records.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& r : records) {
    const auto pred = classify_action_word(model, r, class_map, lexicon);
    hits += pred.label == text::label_record(r, lexicon, class_map);
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::string TrainResult::log_tsv() const {
  std::string out = "epoch\ttrain_loss\tval_loss\tval_accuracy\tselected\n";
  char buf[160];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "%zu\t%.9f\t%.9f\t%.6f\t%s\n", e.epoch, e.train_loss,
                  e.val_loss, e.val_accuracy, e.epoch == best_epoch ? "*" : "");
    out += buf;
  }
  return out;
}

TrainResult train(std::span<const corpus::FunctionRecord> train_records,
                  std::span<const corpus::FunctionRecord> val_records, const VocabSet& vocabs,
                  const TrainConfig& config, const text::VerbLexicon& lexicon,
                  const text::ClassMap& class_map) {
  validate(config);
  if (train_records.empty()) throw DataError("train: empty training set");
  if (val_records.empty()) throw DataError("train: empty validation set");

  const Dims dims = make_dims(vocabs, config, class_map);
  Model model{ModelParams::initialize(dims, config.seed), vocabs, config.input};

  const auto encode_all = [&](std::span<const corpus::FunctionRecord> records) {
    std::vector<Example> out;
    out.reserve(records.size());
    for (const auto& r : records) {
      out.push_back(make_example(model, r, text::label_record(r, lexicon, class_map)));
    }
    return out;
  };
  const std::vector<Example> train_set = encode_all(train_records);
  const std::vector<Example> val_set = encode_all(val_records);

  Rng rng(mix_seed(config.seed, 0x5eed));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.params = model.params;
  double best_acc = -1.0;
  double best_loss = 0.0;
  const auto started = std::chrono::steady_clock::now();

  std::vector<Example> batch;
  for (std::size_t epoch = 1; epoch <= config.epochs_max; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t unit_sum = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      batch.clear();
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);

      ModelParams grad;
      std::size_t units = 0;
      const double loss = batch_loss(model.params, batch, &grad, &units);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_index));
      }
      if (config.clip_norm > 0.0) {
        const double norm = std::sqrt(grad.squared_norm());
        if (norm > config.clip_norm) grad.scale(config.clip_norm / norm);
      }
      model.params.add_scaled(grad, -config.learning_rate);
      loss_sum += loss * static_cast<double>(units);
      unit_sum += units;
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(unit_sum);
    entry.val_loss = batch_loss(model.params, val_set);
    entry.val_accuracy = class_accuracy(model, val_records, lexicon, class_map);
    result.log.push_back(entry);

    if (entry.val_accuracy > best_acc ||
        (entry.val_accuracy == best_acc && entry.val_loss < best_loss)) {
      best_acc = entry.val_accuracy;
      best_loss = entry.val_loss;
      result.best_epoch = epoch;
      result.params = model.params;
    }
    if (config.stop_loss > 0.0 && entry.train_loss < config.stop_loss) break;
    if (config.wallclock_max_seconds > 0.0) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
      if (elapsed.count() >= config.wallclock_max_seconds) {
        result.stopped_by_wallclock = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace awp::model
