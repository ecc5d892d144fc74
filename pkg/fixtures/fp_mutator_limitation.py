# Known limitation: `insert` is not on the curated mutator list, so the
# receiver stays "unchanged" and the call below is flagged even though its
# argument really does differ between iterations.
import tensorflow as tf

window = []
for step in range(100):
    window.insert(0, step)
    score = tf.reduce_sum(window)
