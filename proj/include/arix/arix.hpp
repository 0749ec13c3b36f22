#pragma once

#include "arix/bayes.hpp"
#include "arix/corpus.hpp"
#include "arix/embedding.hpp"
#include "arix/errors.hpp"
#include "arix/extraction.hpp"
#include "arix/hash.hpp"
#include "arix/io.hpp"
#include "arix/matrix.hpp"
#include "arix/nn.hpp"
#include "arix/pipeline.hpp"
#include "arix/sectionfilter.hpp"
#include "arix/semantic.hpp"
#include "arix/synthcorpus.hpp"
#include "arix/tokenize.hpp"
#include "arix/topic.hpp"
