# -*- Mode:Python; indent-tabs-mode:nil; tab-width:4; encoding:utf8 -*-
#
# This file is part of abstain.
#
# abstain is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by the
# Free Software Foundation; either version 2 of the License, or (at your
# option) any later version.
#
# abstain is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with abstain; if not, write to the Free Software Foundation,
# Inc., 59 Temple Place, Suite 330, Boston, MA 02111-1307 USA

import pytest

from abstain import records
from abstain import synthetic


@pytest.fixture(scope=u"class")
def synthetic_log(request, tmp_path_factory):
    u"""Two-Gaussian prediction log shared by the tests of one class.

    Sets log_path and log_records on the class.  Activate this fixture on
    unittest test classes by means of @pytest.mark.usefixtures("synthetic_log").
    Classes may set synth_n (default 2000)."""
    n = getattr(request.cls, u"synth_n", 2000)
    path = str(tmp_path_factory.mktemp(u"synthetic") / u"log.jsonl")
    recs = synthetic.write_synthetic(path, n, 3.0, 0.3, 7)
    request.cls.log_path = path
    request.cls.log_records = recs
    request.cls.log_labels = dict((r.id, records.derive_label(r)) for r in recs)
    yield
