#pragma once

#include "adjacency.hpp"
#include "cells.hpp"
#include "combinatorics.hpp"
#include "io.hpp"
#include "limits.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "spectra.hpp"
#include "words.hpp"
