#pragma once

#include "tqr/error.hpp"
#include "tqr/log.hpp"

#include "tqr/nn/adam.hpp"
#include "tqr/nn/checkpoint.hpp"
#include "tqr/nn/gradient_check.hpp"
#include "tqr/nn/graph.hpp"
#include "tqr/nn/layers.hpp"
#include "tqr/nn/ops.hpp"
#include "tqr/nn/parameter_store.hpp"
#include "tqr/nn/random.hpp"
#include "tqr/nn/tensor.hpp"

#include "tqr/text/lemmatizer.hpp"
#include "tqr/text/pipeline.hpp"
#include "tqr/text/pos_tagger.hpp"
#include "tqr/text/temporal_ner.hpp"
#include "tqr/text/tfidf.hpp"
#include "tqr/text/token.hpp"
#include "tqr/text/tokenizer.hpp"

#include "tqr/corpus/dataset.hpp"
#include "tqr/corpus/split.hpp"
#include "tqr/corpus/stats.hpp"
#include "tqr/corpus/synthetic.hpp"
#include "tqr/corpus/timex2.hpp"
#include "tqr/corpus/types.hpp"

#include "tqr/reader/decode.hpp"
#include "tqr/reader/embedding.hpp"
#include "tqr/reader/features.hpp"
#include "tqr/reader/model.hpp"

#include "tqr/training/batch.hpp"
#include "tqr/training/config.hpp"
#include "tqr/training/model_io.hpp"
#include "tqr/training/train.hpp"

#include "tqr/evaluation/ablation.hpp"
#include "tqr/evaluation/metrics.hpp"
