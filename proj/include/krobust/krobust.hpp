/* Copyright 2026 The krobust Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef KROBUST_KROBUST_HPP_
#define KROBUST_KROBUST_HPP_

#include "krobust/attack.hpp"
#include "krobust/corpus.hpp"
#include "krobust/error.hpp"
#include "krobust/eval.hpp"
#include "krobust/experiment.hpp"
#include "krobust/jamo.hpp"
#include "krobust/layerstack.hpp"
#include "krobust/math.hpp"
#include "krobust/pooling.hpp"
#include "krobust/probe.hpp"
#include "krobust/random.hpp"
#include "krobust/synthetic.hpp"
#include "krobust/utf8.hpp"

#endif  // KROBUST_KROBUST_HPP_
