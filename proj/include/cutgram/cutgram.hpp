#pragma once

#include "cutgram/andor_index.hpp"
#include "cutgram/coverage.hpp"
#include "cutgram/cut_selection.hpp"
#include "cutgram/cutnodes.hpp"
#include "cutgram/error.hpp"
#include "cutgram/grammar.hpp"
#include "cutgram/node_entropy.hpp"
#include "cutgram/pipeline.hpp"
#include "cutgram/phrase_entropy.hpp"
#include "cutgram/rule_extraction.hpp"
#include "cutgram/sexpr.hpp"
#include "cutgram/threshold_search.hpp"
#include "cutgram/union_find.hpp"
