#pragma once

// Umbrella header for the whole toolkit.

#include "sympref/cfg.hpp"
#include "sympref/grader.hpp"
#include "sympref/io/corpus.hpp"
#include "sympref/io/jsonl.hpp"
#include "sympref/metrics.hpp"
#include "sympref/minilang/ast.hpp"
#include "sympref/minilang/interp.hpp"
#include "sympref/minilang/lexer.hpp"
#include "sympref/minilang/parser.hpp"
#include "sympref/minilang/print.hpp"
#include "sympref/minilang/typecheck.hpp"
#include "sympref/prefdata.hpp"
#include "sympref/solver.hpp"
#include "sympref/symexec.hpp"
#include "sympref/testgen.hpp"
#include "sympref/toytrain/critic.hpp"
#include "sympref/toytrain/dpo.hpp"
#include "sympref/toytrain/grammar.hpp"
#include "sympref/toytrain/loop.hpp"
#include "sympref/toytrain/reinforce.hpp"
