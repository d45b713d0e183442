# Tests for periocular_eval
