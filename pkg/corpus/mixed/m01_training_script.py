import tensorflow as tf


def input_fn(files):
    ds = tf.data.TFRecordDataset(files)
    ds = ds.map(parse_record)  # expect: MOB001, DPM001
    ds = ds.batch(BATCH)
    return ds.repeat()


weights = tf.Variable(initial)
optimizer = tf.train.GradientDescentOptimizer(0.5)
sess = tf.Session()

for epoch in range(EPOCHS):
    objective = tf.reduce_mean(weights)  # expect: RNC001
    sess.run(optimizer.minimize(objective))  # expect: RNC001
