#pragma once

#include "automaton.hpp"
#include "bimachine.hpp"
#include "canonical.hpp"
#include "errors.hpp"
#include "functional.hpp"
#include "monoid.hpp"
#include "output_graph.hpp"
#include "partition.hpp"
#include "text_format.hpp"
#include "transducer.hpp"
#include "word.hpp"
