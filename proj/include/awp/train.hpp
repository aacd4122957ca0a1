// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "awp/network.hpp"

namespace awp::model {

struct TrainConfig {
  std::size_t epochs_max = 10;
  double wallclock_max_seconds = 0.0;  // 0 = no cap
  std::size_t batch_size = 16;
  double learning_rate = 0.5;
  double clip_norm = 5.0;  // 0 disables clipping
  int embed_dim = 32;
  int hidden_dim = 64;
  InputConfig input;
  std::uint64_t seed = 1;
  Objective objective = Objective::summary;
  /// Stop once an epoch's mean training loss falls below this (0 = never).
  double stop_loss = 0.0;
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  bool stopped_by_wallclock = false;

  /// Tab-separated per-epoch log; "*" marks the selected checkpoint.
  std::string log_tsv() const;
};

/// Mini-batch gradient descent with optional global-norm clipping.
///
/// After each epoch the validation set is scored (first-token / class
/// accuracy); the returned parameters are those of the epoch with the
/// highest validation accuracy, ties going to the lower validation loss.
/// Throws NumericError naming the batch on a non-finite loss.
TrainResult train(std::span<const corpus::FunctionRecord> train_records,
                  std::span<const corpus::FunctionRecord> val_records, const VocabSet& vocabs,
                  const TrainConfig& config, const text::VerbLexicon& lexicon,
                  const text::ClassMap& class_map);

Dims make_dims(const VocabSet& vocabs, const TrainConfig& config, const text::ClassMap& class_map);

/// Fraction of records whose predicted class equals the gold label.
double class_accuracy(const Model& model, std::span<const corpus::FunctionRecord> records,
                      const text::VerbLexicon& lexicon, const text::ClassMap& class_map);

}  // namespace awp::model
