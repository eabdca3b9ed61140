// Copyright 2026 The Coupon Probing Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header.

#ifndef COUPON_PROBING_COUPON_PROBING_H_
#define COUPON_PROBING_COUPON_PROBING_H_

#include "coupon_probing/influence.h"
#include "coupon_probing/instance_io.h"
#include "coupon_probing/lp.h"
#include "coupon_probing/model.h"
#include "coupon_probing/oracle.h"
#include "coupon_probing/random.h"
#include "coupon_probing/relaxation.h"
#include "coupon_probing/report.h"
#include "coupon_probing/rounding.h"
#include "coupon_probing/sequencing.h"

#endif  // COUPON_PROBING_COUPON_PROBING_H_
