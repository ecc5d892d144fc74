import tensorflow as tf

ds = tf.data.Dataset.from_tensor_slices(rows)
ds = ds.batch(16)
ds = ds.map(to_features, num_parallel_calls=2)

metric = tf.zeros(())

for batch_id in range(N_BATCHES):
    delta = tf.abs(metric)  # expect: RNC001
